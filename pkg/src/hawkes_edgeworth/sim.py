"""Exponential Hawkes processes: parameters, event sequences, simulation.

The intensity is the predictable (left-continuous) version

    lambda_t = mu + sum_{tau_j < t} alpha * exp(-beta * (t - tau_j)),

started from ``mu`` at time 0.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from ._io import read_csv, read_json, write_csv, write_json
from .errors import FormatError

# Proposals drawn per refill of the thinning loop. Part of the seed -> path
# contract: changing it changes every simulated path.
THINNING_CHUNK = 256


@dataclass(frozen=True)
class Theta:
    """Kernel parameters (mu, alpha, beta); index order 0, 1, 2."""

    mu: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("mu", "alpha", "beta"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v <= 0:
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
            object.__setattr__(self, name, v)

    @classmethod
    def from_array(cls, arr):
        mu, alpha, beta = (float(v) for v in arr)
        return cls(mu, alpha, beta)

    def as_array(self):
        return np.array([self.mu, self.alpha, self.beta])

    @property
    def branching_ratio(self):
        return self.alpha / self.beta

    @property
    def stationary_rate(self):
        """Long-run mean intensity mu / (1 - alpha/beta)."""
        return self.mu / (1.0 - self.branching_ratio)

    def to_dict(self):
        return {"mu": self.mu, "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class EventSequence:
    """Strictly increasing jump times on ``[0, horizon)``."""

    times: np.ndarray
    horizon: float

    def __post_init__(self):
        horizon = float(self.horizon)
        if not np.isfinite(horizon) or horizon <= 0:
            raise ValueError(f"horizon must be positive, got {horizon!r}")
        times = np.ascontiguousarray(self.times, dtype=np.float64).reshape(-1)
        if times.size:
            if not np.all(np.isfinite(times)):
                raise ValueError("event times must be finite")
            if times[0] < 0 or times[-1] >= horizon:
                raise ValueError("event times must lie in [0, horizon)")
            if np.any(np.diff(times) <= 0):
                raise ValueError("event times must be strictly increasing")
        times.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "horizon", horizon)

    def __len__(self):
        return self.times.size


def _rng(seed):
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


def _thin(mu, alpha, beta, horizon, seed):
    rng = _rng(seed)
    out = np.empty(THINNING_CHUNK)
    pieces = []
    t = 0.0
    s0 = 0.0
    while True:
        exps = rng.standard_exponential(THINNING_CHUNK)
        unifs = rng.random(THINNING_CHUNK)
        n_acc, t, s0, _, done = kernels.thin_chunk(mu, alpha, beta, horizon, t, s0, exps, unifs, out)
        pieces.append(out[:n_acc].copy())
        if done:
            break
    return np.concatenate(pieces) if pieces else np.empty(0)


def simulate(theta, horizon, seed):
    """Simulate one path on ``[0, horizon)`` by Ogata thinning.

    The dominating rate is the right-limit intensity at the current time,
    which bounds the intensity until the next accepted event because the
    kernel only decays in between.
    """
    horizon = float(horizon)
    if not np.isfinite(horizon) or horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon!r}")
    if theta.alpha >= theta.beta:
        raise ValueError(
            f"alpha/beta = {theta.branching_ratio:.4g} >= 1: the process is not stationary"
        )
    times = _thin(theta.mu, theta.alpha, theta.beta, horizon, seed)
    return EventSequence(times, horizon)


def _simulate_unchecked(mu, alpha, beta, horizon, seed):
    """Test hook: no parameter checks, so alpha = 0 gives a Poisson process."""
    return EventSequence(_thin(float(mu), float(alpha), float(beta), float(horizon), seed), horizon)


def intensity_at(events, t, theta):
    """Left-limit intensity at ``t``; an event exactly at ``t`` is excluded."""
    times = events.times
    past = times[: np.searchsorted(times, t, side="left")]
    return theta.mu + theta.alpha * float(np.sum(np.exp(-theta.beta * (t - past))))


def write_events(path, events, theta=None, seed=None):
    """Write ``time`` CSV plus a ``.json`` sidecar holding horizon and theta."""
    path = Path(path)
    write_csv(path, ["time"], ((t,) for t in events.times))
    meta = {"horizon": events.horizon, "n_events": len(events)}
    if theta is not None:
        meta["theta"] = theta.to_dict()
    if seed is not None:
        meta["seed"] = int(seed)
    write_json(sidecar_path(path), meta)


def sidecar_path(path):
    return Path(path).with_suffix(".json")


def read_events(path, horizon=None):
    """Read an events CSV. ``horizon`` falls back to the sidecar descriptor.

    Returns ``(events, theta_or_None)``.
    """
    path = Path(path)
    data = read_csv(path, ["time"])
    meta = {}
    side = sidecar_path(path)
    if side.exists():
        meta = read_json(side)
    if horizon is None:
        if "horizon" not in meta:
            raise FormatError("no horizon given and no sidecar descriptor found", path)
        horizon = meta["horizon"]
    theta = Theta(**meta["theta"]) if "theta" in meta else None
    try:
        events = EventSequence(data[:, 0], float(horizon))
    except ValueError as exc:
        raise FormatError(str(exc), path) from None
    return events, theta
