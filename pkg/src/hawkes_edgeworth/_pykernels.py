"""Pure-Python fallback for the compiled kernels in ``_kernels.pyx``.

Same signatures, same operation order, so results agree with the
extension to the last bit on IEEE hardware without fused multiply-add.
"""

from math import exp, expm1, log

import numpy as np


def thin_chunk(mu, alpha, beta, horizon, t, s0, exps, unifs, out):
    m = len(exps)
    k = 0
    n_acc = 0
    done = False
    while k < m:
        lam_star = mu + alpha * s0
        w = float(exps[k]) / lam_star
        t_new = t + w
        if t_new >= horizon:
            k += 1
            done = True
            break
        s_new = s0 * exp(-beta * w)
        if float(unifs[k]) * lam_star < mu + alpha * s_new:
            out[n_acc] = t_new
            n_acc += 1
            s_new += 1.0
        t = t_new
        s0 = s_new
        k += 1
    return n_acc, t, s0, k, done


def core_sums(times, horizon, beta):
    n = len(times)
    states = np.zeros((n, 3), dtype=np.float64)
    s0 = s1 = s2 = 0.0
    prev = 0.0
    for i in range(n):
        ti = float(times[i])
        if i > 0:
            d = ti - prev
            e = exp(-beta * d)
            p0 = s0 + 1.0
            s2 = e * (s2 + 2.0 * d * s1 + d * d * p0)
            s1 = e * (s1 + d * p0)
            s0 = e * p0
        states[i, 0] = s0
        states[i, 1] = s1
        states[i, 2] = s2
        prev = ti
    if n > 0:
        d = horizon - prev
        e = exp(-beta * d)
        p0 = s0 + 1.0
        s2 = e * (s2 + 2.0 * d * s1 + d * d * p0)
        s1 = e * (s1 + d * p0)
        s0 = e * p0
    return states, np.array([s0, s1, s2])


def loglik_value(times, horizon, mu, alpha, beta):
    s0 = 0.0
    acc = 0.0
    comp = 0.0
    prev = 0.0
    for i, ti in enumerate(times.tolist()):
        if i > 0:
            s0 = exp(-beta * (ti - prev)) * (s0 + 1.0)
        acc += log(mu + alpha * s0)
        comp -= expm1(-beta * (horizon - ti))
        prev = ti
    return acc - mu * horizon - alpha / beta * comp


def loglik_derivs(times, horizon, mu, alpha, beta):
    s0 = s1 = s2 = 0.0
    val = a_sum = 0.0
    g0 = g1 = g2 = 0.0
    h00 = h01 = h02 = h11 = h12 = h22 = 0.0
    prev = 0.0
    ts = times.tolist()
    for i, ti in enumerate(ts):
        if i > 0:
            d = ti - prev
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
        a_sum -= expm1(-beta * (horizon - ti))
        prev = ti
    if ts:
        d = horizon - ts[-1]
        e = exp(-beta * d)
        p0 = s0 + 1.0
        s2 = e * (s2 + 2.0 * d * s1 + d * d * p0)
        s1 = e * (s1 + d * p0)
    b_sum = s1 if ts else 0.0
    c_sum = s2 if ts else 0.0
    db = b_sum / beta - a_sum / (beta * beta)
    val -= mu * horizon + alpha * a_sum / beta
    score = np.array([g0 - horizon, g1 - a_sum / beta, g2 - alpha * db])
    h12 -= db
    h22 -= alpha * (-c_sum / beta - 2.0 * b_sum / (beta * beta)
                    + 2.0 * a_sum / (beta * beta * beta))
    hess = np.array([[h00, h01, h02], [h01, h11, h12], [h02, h12, h22]])
    return val, score, hess


def third_sums(times, mu, alpha, beta):
    s0 = s1 = s2 = 0.0
    r = [0.0] * 10
    prev = 0.0
    for i, ti in enumerate(times.tolist()):
        if i > 0:
            d = ti - prev
            e = exp(-beta * d)
            p0 = s0 + 1.0
            s2 = e * (s2 + 2.0 * d * s1 + d * d * p0)
            s1 = e * (s1 + d * p0)
            s0 = e * p0
        prev = ti
        x1 = alpha * s0
        x2 = alpha * s1
        x3 = alpha * s2
        lam = mu + x1
        il3 = 1.0 / (lam * lam * lam)
        r[0] += 2.0 * il3
        r[1] += 2.0 * x1 / alpha * il3
        r[2] += -2.0 * x2 * il3
        r[3] += 2.0 * x1 * x1 / (alpha * alpha) * il3
        r[4] += (mu * x2 - x1 * x2) / alpha * il3
        r[5] += (2.0 * x2 * x2 - x3 * lam) * il3
        r[6] += 2.0 * x1 * x1 * x1 / (alpha * alpha * alpha) * il3
        r[7] += 2.0 * mu * x1 * x2 / (alpha * alpha) * il3
        r[8] += (-x1 * x3 * lam - 2.0 * mu * x2 * x2) / alpha * il3
        r[9] += (3.0 * x2 * x3 * lam - 2.0 * x2 * x2 * x2) * il3
    return np.array(r)
