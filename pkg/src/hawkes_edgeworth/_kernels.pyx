# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Mirrors ``_pykernels`` function by function."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, expm1, log

cnp.import_array()


def thin_chunk(double mu, double alpha, double beta, double horizon,
               double t, double s0,
               const double[::1] exps, const double[::1] unifs,
               double[::1] out):
    """Run thinning proposals until the horizon or the draws run out.

    ``s0`` is the right-limit excitation sum at ``t``. Returns
    ``(n_accepted, t, s0, n_used, done)``.
    """
    cdef Py_ssize_t m = exps.shape[0]
    cdef Py_ssize_t k = 0, n_acc = 0
    cdef double lam_star, w, t_new, s_new
    cdef bint done = False
    with nogil:
        while k < m:
            lam_star = mu + alpha * s0
            w = exps[k] / lam_star
            t_new = t + w
            if t_new >= horizon:
                k += 1
                done = True
                break
            s_new = s0 * exp(-beta * w)
            if unifs[k] * lam_star < mu + alpha * s_new:
                out[n_acc] = t_new
                n_acc += 1
                s_new += 1.0
            t = t_new
            s0 = s_new
            k += 1
    return n_acc, t, s0, k, done


def core_sums(const double[::1] times, double horizon, double beta):
    """Left-limit kernel sums (S0, S1, S2) at each event and at the horizon."""
    cdef Py_ssize_t n = times.shape[0]
    states_arr = np.zeros((n, 3), dtype=np.float64)
    cdef double[:, ::1] states = states_arr
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, p0, d, e
    cdef double prev = 0.0
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            if i > 0:
                d = times[i] - prev
                e = exp(-beta * d)
                p0 = s0 + 1.0
                s2 = e * (s2 + 2.0 * d * s1 + d * d * p0)
                s1 = e * (s1 + d * p0)
                s0 = e * p0
            states[i, 0] = s0
            states[i, 1] = s1
            states[i, 2] = s2
            prev = times[i]
        if n > 0:
            d = horizon - prev
            e = exp(-beta * d)
            p0 = s0 + 1.0
            s2 = e * (s2 + 2.0 * d * s1 + d * d * p0)
            s1 = e * (s1 + d * p0)
            s0 = e * p0
    return states_arr, np.array([s0, s1, s2])


def loglik_value(const double[::1] times, double horizon,
                 double mu, double alpha, double beta):
    cdef Py_ssize_t n = times.shape[0]
    cdef double s0 = 0.0, d, acc = 0.0, comp = 0.0
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            if i > 0:
                d = times[i] - times[i - 1]
                s0 = exp(-beta * d) * (s0 + 1.0)
            acc += log(mu + alpha * s0)
            comp -= expm1(-beta * (horizon - times[i]))
    return acc - mu * horizon - alpha / beta * comp


def loglik_derivs(const double[::1] times, double horizon,
                  double mu, double alpha, double beta):
    """Log-likelihood, score and Hessian in one pass over the events."""
    cdef Py_ssize_t n = times.shape[0]
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, p0, d, e, lam, il, il2
    cdef double val = 0.0, a_sum = 0.0
    cdef double g0 = 0.0, g1 = 0.0, g2 = 0.0
    cdef double h00 = 0.0, h01 = 0.0, h02 = 0.0, h11 = 0.0, h12 = 0.0, h22 = 0.0
    cdef Py_ssize_t i
    cdef double b_sum, c_sum, db, dl1, dl2
    with nogil:
        for i in range(n):
            if i > 0:
                d = times[i] - times[i - 1]
                e = exp(-beta * d)
                p0 = s0 + 1.0
                s2 = e * (s2 + 2.0 * d * s1 + d * d * p0)
                s1 = e * (s1 + d * p0)
                s0 = e * p0
            lam = mu + alpha * s0
            il = 1.0 / lam
            il2 = il * il
            dl1 = s0
            dl2 = -alpha * s1
            val += log(lam)
            g0 += il
            g1 += dl1 * il
            g2 += dl2 * il
            h00 -= il2
            h01 -= dl1 * il2
            h02 -= dl2 * il2
            h11 -= dl1 * dl1 * il2
            h12 += -s1 * il - dl1 * dl2 * il2
            h22 += alpha * s2 * il - dl2 * dl2 * il2
            a_sum -= expm1(-beta * (horizon - times[i]))
        if n > 0:
            d = horizon - times[n - 1]
            e = exp(-beta * d)
            p0 = s0 + 1.0
            s2 = e * (s2 + 2.0 * d * s1 + d * d * p0)
            s1 = e * (s1 + d * p0)
    b_sum = s1 if n > 0 else 0.0
    c_sum = s2 if n > 0 else 0.0
    db = b_sum / beta - a_sum / (beta * beta)
    val -= mu * horizon + alpha * a_sum / beta
    score = np.array([g0 - horizon, g1 - a_sum / beta, g2 - alpha * db])
    h12 -= db
    h22 -= alpha * (-c_sum / beta - 2.0 * b_sum / (beta * beta)
                    + 2.0 * a_sum / (beta * beta * beta))
    hess = np.array([[h00, h01, h02], [h01, h11, h12], [h02, h12, h22]])
    return val, score, hess


def third_sums(const double[::1] times, double mu, double alpha, double beta):
    """Raw jump sums of the ten distinct third-derivative summands.

    Order: 111, 112, 113, 122, 123, 133, 222, 223, 233, 333.
    """
    cdef Py_ssize_t n = times.shape[0]
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, p0, d, e
    cdef double x1, x2, x3, lam, il3
    cdef double r0 = 0, r1 = 0, r2 = 0, r3 = 0, r4 = 0
    cdef double r5 = 0, r6 = 0, r7 = 0, r8 = 0, r9 = 0
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            if i > 0:
                d = times[i] - times[i - 1]
                e = exp(-beta * d)
                p0 = s0 + 1.0
                s2 = e * (s2 + 2.0 * d * s1 + d * d * p0)
                s1 = e * (s1 + d * p0)
                s0 = e * p0
            x1 = alpha * s0
            x2 = alpha * s1
            x3 = alpha * s2
            lam = mu + x1
            il3 = 1.0 / (lam * lam * lam)
            r0 += 2.0 * il3
            r1 += 2.0 * x1 / alpha * il3
            r2 += -2.0 * x2 * il3
            r3 += 2.0 * x1 * x1 / (alpha * alpha) * il3
            r4 += (mu * x2 - x1 * x2) / alpha * il3
            r5 += (2.0 * x2 * x2 - x3 * lam) * il3
            r6 += 2.0 * x1 * x1 * x1 / (alpha * alpha * alpha) * il3
            r7 += 2.0 * mu * x1 * x2 / (alpha * alpha) * il3
            r8 += (-x1 * x3 * lam - 2.0 * mu * x2 * x2) / alpha * il3
            r9 += (3.0 * x2 * x3 * lam - 2.0 * x2 * x2 * x2) * il3
    return np.array([r0, r1, r2, r3, r4, r5, r6, r7, r8, r9])
