import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hawkes_edgeworth import EventSequence, Theta, core_path, derivatives, loglik
from hawkes_edgeworth.edgeworth import q_t3_marginal_cdf

from oracles import naive_loglik_derivs, naive_sums_at_events, random_coeffs, rel_error

positive = st.floats(0.1, 2.0)


@st.composite
def thetas(draw):
    beta = draw(positive)
    alpha = draw(st.floats(0.05, 0.95)) * beta
    return Theta(draw(positive), alpha, beta)


@st.composite
def event_sequences(draw):
    horizon = draw(st.floats(1.0, 50.0))
    raw = draw(arrays(np.float64, st.integers(0, 60), elements=st.floats(0.0, 1.0, exclude_max=True)))
    times = np.unique(raw * horizon)
    times = times[times < horizon]
    return EventSequence(times, horizon)


@settings(max_examples=60, deadline=None)
@given(event_sequences(), thetas())
def test_recursion_matches_naive(ev, theta):
    if len(ev):
        ref = theta.alpha * naive_sums_at_events(ev.times, theta.beta)
        assert rel_error(core_path(ev, theta).at_events[:, 1:], ref) <= 1e-10
    v, s, h = naive_loglik_derivs(ev.times, ev.horizon, *theta.as_array())
    d = derivatives(ev, theta)
    assert abs(d.value - v) <= 1e-10 * max(1.0, abs(v))
    assert abs(loglik(ev, theta) - v) <= 1e-10 * max(1.0, abs(v))
    assert rel_error(d.score, s) <= 1e-10
    assert rel_error(d.hess, h) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.5, 50.0), st.integers(0, 2))
def test_pseudo_cdf_is_monotone_envelope(seed, t_horizon, coord):
    c = random_coeffs(np.random.default_rng(seed), t_horizon=t_horizon)
    sd = math.sqrt(c.g_inv[coord, coord])
    F = q_t3_marginal_cdf(coord, np.linspace(-12 * sd, 12 * sd, 1201), c)
    assert np.all(np.diff(F) >= 0)
    assert F[0] >= 0.0 and F[-1] == 1.0
