"""Hawkes core processes X1, X2, X3 along a path.

With d = t - tau_j over past events,

    X1 = sum alpha e^{-beta d},  X2 = sum alpha d e^{-beta d},
    X3 = sum alpha d^2 e^{-beta d},

and lambda = mu + X1. Values are left limits, evaluated by an O(1)-per-event
recursion on the alpha-free sums S_k = X_{k+1} / alpha.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels


@dataclass(frozen=True)
class CoreState:
    lam: float
    x1: float
    x2: float
    x3: float


@dataclass(frozen=True)
class CorePath:
    events: object
    theta: object
    # (n, 4) array of left limits at each event: columns lambda, x1, x2, x3
    at_events: np.ndarray
    at_horizon: CoreState

    @property
    def states_at_events(self):
        return [CoreState(*row) for row in self.at_events]

    @property
    def state_at_horizon(self):
        return self.at_horizon


def core_path(events, theta):
    sums, at_t = kernels.core_sums(events.times, events.horizon, theta.beta)
    x = theta.alpha * sums
    at_events = np.column_stack([theta.mu + x[:, 0], x])
    xt = theta.alpha * at_t
    return CorePath(events, theta, at_events, CoreState(theta.mu + xt[0], *xt))


def step(state, theta, dt):
    """Advance a left-limit core state by ``dt`` with no events in between."""
    e = np.exp(-theta.beta * dt)
    x1, x2, x3 = state.x1, state.x2, state.x3
    n1 = e * x1
    n2 = e * (x2 + dt * x1)
    n3 = e * (x3 + 2.0 * dt * x2 + dt * dt * x1)
    return CoreState(theta.mu + n1, n1, n2, n3)


def jump(state, theta):
    """Right limit at an event: each X_k gains the fresh term (d = 0)."""
    return CoreState(state.lam + theta.alpha, state.x1 + theta.alpha, state.x2, state.x3)


def compensator(events, theta):
    """Integral of the intensity over ``[0, horizon]`` in closed form."""
    u = events.horizon - events.times
    return theta.mu * events.horizon - theta.alpha / theta.beta * float(np.sum(np.expm1(-theta.beta * u)))
