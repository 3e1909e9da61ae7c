"""Log-likelihood of the exponential Hawkes model and its derivatives.

Index convention everywhere: 0 <-> mu, 1 <-> alpha, 2 <-> beta.

Derivatives come from differentiating l(theta) = sum log lambda(tau_i) - Lambda(T)
directly. The compensator Lambda(T) = mu T + (alpha/beta) sum (1 - e^{-beta u_j}),
u_j = T - tau_j, has elementary parameter derivatives, so no quadrature is needed.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import kernels

# Distinct index triples of the third-derivative tensor, in kernel order.
THIRD_INDEX = [
    (0, 0, 0), (0, 0, 1), (0, 0, 2), (0, 1, 1), (0, 1, 2),
    (0, 2, 2), (1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 2, 2),
]


@dataclass(frozen=True)
class LogLikDerivatives:
    value: float
    score: np.ndarray
    hess: np.ndarray


@dataclass(frozen=True)
class ThirdDerivSummands:
    nu3_path: np.ndarray


def _observed(times, horizon):
    times = np.ascontiguousarray(times, dtype=np.float64)
    return times[: np.searchsorted(times, horizon, side="right")]


def loglik(events, theta):
    return loglik_times(events.times, events.horizon, theta)


def loglik_times(times, horizon, theta):
    t = _observed(times, horizon)
    return kernels.loglik_value(t, float(horizon), theta.mu, theta.alpha, theta.beta)


def derivatives(events, theta):
    return derivatives_times(events.times, events.horizon, theta)


def derivatives_times(times, horizon, theta):
    """Value, score and Hessian; events after ``horizon`` are ignored."""
    t = _observed(times, horizon)
    value, score, hess = kernels.loglik_derivs(t, float(horizon), theta.mu, theta.alpha, theta.beta)
    return LogLikDerivatives(value, score, hess)


def symmetric3(values):
    """Fill a fully symmetric 3x3x3 tensor from its ten distinct entries."""
    out = np.empty((3, 3, 3))
    for v, idx in zip(values, THIRD_INDEX):
        for p in set(permutations(idx)):
            out[p] = v
    return out


def third_summands(events, theta0):
    """Per-path statistic whose expectation is nu_abc(theta0).

    Each entry is (1/T) times a jump sum of a rational function of the core
    processes at the event left limits. These equal T^{-1} l_abc in
    expectation, not pathwise.
    """
    t = _observed(events.times, events.horizon)
    raw = kernels.third_sums(t, theta0.mu, theta0.alpha, theta0.beta)
    return ThirdDerivSummands(symmetric3(raw / events.horizon))
