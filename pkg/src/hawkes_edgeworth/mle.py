"""Maximum-likelihood fitting by safeguarded Newton ascent on a box."""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DegenerateLikelihoodError, NumericalError
from .sim import Theta


@dataclass(frozen=True)
class FitOptions:
    lower: tuple = (1e-6, 1e-6, 1e-6)
    upper: tuple = (50.0, 50.0, 50.0)
    max_iter: int = 200
    grad_tol: float = 1e-8
    armijo_c: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 60
    n_restarts: int = 4
    restart_seed: int = 0

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != (3,) or hi.shape != (3,):
            raise ValueError("bounds must have three components")
        if not (np.all(np.isfinite(hi)) and np.all(lo > 0) and np.all(lo <= hi)):
            raise ValueError("bounds must satisfy 0 < lower <= upper < inf")


@dataclass(frozen=True)
class MleFit:
    theta_hat: Theta
    converged: bool
    iterations: int
    final_grad_norm: float
    boundary_hit: bool
    loglik: float
    supercritical: bool = False
    n_starts: int = 1
    score: np.ndarray = field(default=None, repr=False)

    def to_dict(self):
        return {
            "theta_hat": self.theta_hat.to_dict(),
            "converged": self.converged,
            "iterations": self.iterations,
            "final_grad_norm": self.final_grad_norm,
            "boundary_hit": self.boundary_hit,
            "supercritical": self.supercritical,
            "loglik": self.loglik,
            "n_starts": self.n_starts,
        }


def default_init(events):
    n = len(events)
    return Theta(max(0.5 * n / events.horizon, 1e-3), 0.5, 1.0)


def _newton(times, horizon, x0, opts):
    lo = np.asarray(opts.lower, dtype=float)
    hi = np.asarray(opts.upper, dtype=float)
    x = np.clip(x0, lo, hi)
    f, g, H = kernels.loglik_derivs(times, horizon, *x)
    if not (math.isfinite(f) and np.all(np.isfinite(g))):
        raise NumericalError(f"non-finite log-likelihood at initial point {x.tolist()}")
    boundary = False
    converged = False
    it = 0
    while it < opts.max_iter:
        tol = opts.grad_tol * (1.0 + abs(f))
        if np.max(np.abs(g)) <= tol:
            converged = True
            break
        at_lo = x <= lo
        at_hi = x >= hi
        free = ~((at_lo & (g < 0)) | (at_hi & (g > 0)))
        if not free.any() or np.max(np.abs(g[free])) <= tol:
            boundary = True
            break
        it += 1
        d = np.zeros(3)
        gf = g[free]
        negH = -H[np.ix_(free, free)]
        try:
            L = np.linalg.cholesky(negH)
            d[free] = np.linalg.solve(L.T, np.linalg.solve(L, gf))
        except np.linalg.LinAlgError:
            # not concave here: Newton step on |eigenvalues|, still an ascent
            # direction, and it moves along negative curvature instead of
            # zig-zagging like plain gradient ascent on flat ridges
            w, V = np.linalg.eigh(negH)
            w = np.maximum(np.abs(w), 1e-8 * max(np.max(np.abs(w)), 1e-300))
            d[free] = V @ ((V.T @ gf) / w)
            # cap the move at half the coordinate scale
            cap = 0.5 * np.maximum(np.abs(x[free]), 1.0)
            ratio = np.max(np.abs(d[free]) / cap)
            if ratio > 1.0:
                d[free] /= ratio
        slack = 1e-13 * (1.0 + abs(f))
        step = 1.0
        accepted = False
        for _ in range(opts.max_backtracks):
            xn = np.clip(x + step * d, lo, hi)
            fn = kernels.loglik_value(times, horizon, *xn)
            if math.isfinite(fn) and fn >= f + opts.armijo_c * float(g @ (xn - x)) - slack:
                accepted = True
                break
            step *= opts.backtrack
        if not accepted:
            break
        x = xn
        f, g, H = kernels.loglik_derivs(times, horizon, *x)
    at_bound = bool(np.any(x <= lo) or np.any(x >= hi))
    return x, f, g, converged and not boundary, it, boundary or (at_bound and not converged)


def fit(events, theta_init=None, opts=None):
    """Maximize the log-likelihood over the box ``opts.lower .. opts.upper``.

    Raises DegenerateLikelihoodError on an empty path: the likelihood is then
    -mu T, monotone in mu, with no interior maximizer.
    """
    opts = opts or FitOptions()
    if len(events) == 0:
        raise DegenerateLikelihoodError("degenerate likelihood: empty event sequence")
    times = np.ascontiguousarray(events.times)
    horizon = events.horizon
    theta_init = theta_init or default_init(events)
    x0 = theta_init.as_array()

    starts = [x0]
    rng = np.random.Generator(np.random.Philox(opts.restart_seed))
    perturb = np.exp(rng.normal(0.0, 0.5, size=(opts.n_restarts, 3)))
    starts.extend(x0 * p for p in perturb)

    results = []
    for k, start in enumerate(starts):
        try:
            res = _newton(times, horizon, start, opts)
        except NumericalError:
            if k == 0:
                raise
            continue
        results.append(res)
        if res[3]:
            break
    conv = [r for r in results if r[3]]
    pool = conv or results
    best = max(pool, key=lambda r: r[1])
    x, f, g, converged, iters, boundary = best
    theta_hat = Theta.from_array(x)
    supercritical = theta_hat.alpha >= theta_hat.beta
    if supercritical:
        warnings.warn(
            f"fitted branching ratio {theta_hat.branching_ratio:.4g} >= 1", RuntimeWarning, stacklevel=2
        )
    return MleFit(
        theta_hat=theta_hat,
        converged=bool(converged),
        iterations=int(iters),
        final_grad_norm=float(np.max(np.abs(g))),
        boundary_hit=bool(boundary),
        loglik=float(f),
        supercritical=bool(supercritical),
        n_starts=len(results),
        score=g,
    )
