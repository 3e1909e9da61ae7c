import numpy as np
import pytest

from hawkes_edgeworth import Theta, kernels, simulate
from hawkes_edgeworth import _pykernels as py

cy = pytest.importorskip("hawkes_edgeworth._kernels")

THETAS = [Theta(0.5, 1.0, 1.3), Theta(0.2, 0.3, 2.0), Theta(1.5, 0.9, 1.0)]


def test_backend_is_selected():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("theta", THETAS)
def test_core_sums_bit_identical(theta):
    ev = simulate(theta, 100.0, 1)
    a = cy.core_sums(ev.times, ev.horizon, theta.beta)
    b = py.core_sums(ev.times, ev.horizon, theta.beta)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@pytest.mark.parametrize("theta", THETAS)
def test_likelihood_bit_identical(theta):
    ev = simulate(theta, 100.0, 2)
    args = (ev.times, ev.horizon, theta.mu, theta.alpha, theta.beta)
    assert cy.loglik_value(*args) == py.loglik_value(*args)
    ca, cb = cy.loglik_derivs(*args), py.loglik_derivs(*args)
    assert ca[0] == cb[0]
    assert np.array_equal(ca[1], cb[1]) and np.array_equal(ca[2], cb[2])
    t3 = (ev.times, theta.mu, theta.alpha, theta.beta)
    assert np.array_equal(cy.third_sums(*t3), py.third_sums(*t3))


@pytest.mark.parametrize("seed", [0, 5, 17])
def test_thinning_bit_identical(seed):
    rng = np.random.Generator(np.random.Philox(seed))
    exps = rng.standard_exponential(256)
    unifs = rng.random(256)
    out_c = np.empty(256)
    out_p = np.empty(256)
    rc = cy.thin_chunk(0.5, 1.0, 1.3, 30.0, 0.0, 0.0, exps, unifs, out_c)
    rp = py.thin_chunk(0.5, 1.0, 1.3, 30.0, 0.0, 0.0, exps, unifs, out_p)
    assert rc == rp
    assert np.array_equal(out_c[: rc[0]], out_p[: rp[0]])


def test_empty_inputs():
    empty = np.empty(0)
    for mod in (cy, py):
        states, at_t = mod.core_sums(empty, 5.0, 1.3)
        assert states.shape == (0, 3) and np.all(at_t == 0)
        assert mod.loglik_value(empty, 5.0, 0.5, 1.0, 1.3) == -2.5
        assert np.all(mod.third_sums(empty, 0.5, 1.0, 1.3) == 0)


def test_env_var_forces_pure_python():
    import os
    import subprocess
    import sys

    env = dict(os.environ, HAWKES_EDGEWORTH_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import hawkes_edgeworth as h; print(h.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
