import math

import numpy as np
import pytest

from hawkes_edgeworth import EventSequence, FitOptions, Theta, derivatives, fit, loglik, simulate
from hawkes_edgeworth import kernels
from hawkes_edgeworth.errors import DegenerateLikelihoodError, NumericalError
from hawkes_edgeworth.experiment import estimate_from_simulation, replication_seed

THETA0 = Theta(0.5, 1.0, 1.3)


def test_empty_events_are_degenerate():
    with pytest.raises(DegenerateLikelihoodError, match="degenerate likelihood"):
        fit(EventSequence(np.array([]), 30.0))
    assert issubclass(DegenerateLikelihoodError, NumericalError)


def test_bad_bounds_rejected():
    with pytest.raises(ValueError):
        FitOptions(lower=(0, 1e-6, 1e-6))
    with pytest.raises(ValueError):
        FitOptions(lower=(1, 1, 1), upper=(0.5, 2, 2))
    with pytest.raises(ValueError):
        FitOptions(upper=(np.inf, 1, 1))


@pytest.mark.parametrize("seed", range(10))
def test_converged_fit_is_local_max(seed):
    ev = simulate(THETA0, 300.0, seed)
    res = fit(ev)
    assert res.converged and not res.boundary_hit
    d = derivatives(ev, res.theta_hat)
    assert np.max(np.abs(d.score)) <= 1e-8 * (1 + abs(d.value))
    w = np.linalg.eigvalsh(d.hess)
    assert np.all(w <= 1e-6 * np.max(np.abs(w)))
    assert res.loglik == pytest.approx(loglik(ev, res.theta_hat), rel=1e-12)
    assert res.loglik >= loglik(ev, THETA0)


def test_monotone_ascent(monkeypatch):
    ev = simulate(THETA0, 30.0, 3)
    values = []
    orig = kernels.loglik_derivs

    def spy(*args):
        out = orig(*args)
        values.append(out[0])
        return out

    monkeypatch.setattr(kernels, "loglik_derivs", spy)
    res = fit(ev, opts=FitOptions(n_restarts=0))
    assert res.converged
    # derivatives are evaluated only at the start and at accepted iterates
    slack = 1e-13 * (1 + np.abs(values[:-1]))
    assert np.all(np.diff(values) >= -slack)
    assert len(values) == res.iterations + 1


@pytest.mark.filterwarnings("ignore:fitted branching ratio")
def test_deterministic_and_inside_box():
    opts = FitOptions(lower=(1e-3, 1e-3, 1e-3), upper=(5.0, 5.0, 5.0))
    for seed in range(10):
        ev = simulate(THETA0, 30.0, seed)
        a = fit(ev, opts=opts)
        b = fit(ev, opts=opts)
        assert a.theta_hat == b.theta_hat and a.iterations == b.iterations
        x = a.theta_hat.as_array()
        assert np.all(x >= 1e-3) and np.all(x <= 5.0)


def test_boundary_fit_is_flagged():
    # two events far apart: no excitation signal, alpha or beta is pushed to a face
    ev = EventSequence(np.array([1.0, 20.0]), 30.0)
    res = fit(ev)
    if res.boundary_hit:
        assert not res.converged
        x = res.theta_hat.as_array()
        assert np.any(x <= 1e-6) or np.any(x >= 50.0)


def test_nonfinite_start_raises():
    ev = simulate(THETA0, 30.0, 1)
    with pytest.raises(NumericalError):
        fit(ev, Theta(1e308, 1.0, 2.0), FitOptions(upper=(1e308, 50.0, 50.0), n_restarts=0))


def test_asymptotic_normality_at_t300():
    T = 300.0
    R = 3000
    coeffs = estimate_from_simulation(THETA0, T, 5000, master_seed=777)
    fits = [fit(simulate(THETA0, T, replication_seed(778, i))) for i in range(R)]
    ok = np.array([f.converged for f in fits])
    X = np.array([f.theta_hat.as_array() for f in fits])[ok]
    se = X.std(axis=0, ddof=1) / math.sqrt(len(X))
    # the mean carries the O(1/T) bias predicted by the expansion's linear term
    predicted = THETA0.as_array() + coeffs.linear_coef() / T
    assert np.all(np.abs(X.mean(axis=0) - predicted) <= 3 * se)
    sd = (math.sqrt(T) * (X - THETA0.as_array())).std(axis=0, ddof=1)
    target = np.sqrt(np.diag(coeffs.g_inv))
    assert np.all(np.abs(sd / target - 1) <= 0.15)
