"""Monte-Carlo Edgeworth coefficients and the second-order MLE density.

The density of sqrt(T)(theta_hat - theta_0) is approximated by

    q(z) = phi(z; G) [1 + T^{-1/2} (c3_{abc} h_{abc}(z; G) + c1_a h_a(z; G))]

with G the inverse Fisher information and Einstein summation. The
coefficients c3, c1 are built from the third cumulant of the normalized score
and from the covariance between score and centered observed information.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ._io import read_json, write_json
from .errors import DegenerateInformationError, FormatError
from .likelihood import derivatives, third_summands

PARAM_NAMES = ("mu", "alpha", "beta")


@dataclass(frozen=True)
class ReplicationStats:
    """Raw per-path statistics at theta_0.

    z1 = T^{-1/2} score, hess_t = T^{-1} Hessian, nu3 = third-derivative
    jump sums already divided by T.
    """

    z1: np.ndarray
    hess_t: np.ndarray
    nu3: np.ndarray
    horizon: float


@dataclass(frozen=True)
class ZStats:
    z1: np.ndarray
    z2: np.ndarray


@dataclass(frozen=True)
class EdgeworthCoefficients:
    g: np.ndarray
    g_inv: np.ndarray
    nu_ab: np.ndarray
    nu_abc: np.ndarray
    kappa3: np.ndarray
    v_coef: np.ndarray
    mu_coef: np.ndarray
    t_horizon: float
    n_replications: int

    def cubic_coef(self):
        """c3[a1,a2,a3] = kappa3/6 + mu^{a3}_{b1 b2} g^{b1 a1} g^{b2 a2}."""
        gi = self.g_inv
        return self.kappa3 / 6.0 + np.einsum("kij,ia,jb->abk", self.mu_coef, gi, gi)

    def linear_coef(self):
        """c1[a] = mu^{a}_{b1 b2} g^{b1 b2}."""
        return np.einsum("aij,ij->a", self.mu_coef, self.g_inv)

    def to_dict(self):
        return {
            "t_horizon": self.t_horizon,
            "n_replications": self.n_replications,
            "param_order": list(PARAM_NAMES),
            "g": self.g,
            "g_inv": self.g_inv,
            "nu_ab": self.nu_ab,
            "nu_abc": self.nu_abc,
            "kappa3": self.kappa3,
            "v_coef": self.v_coef,
            "mu_coef": self.mu_coef,
        }

    @classmethod
    def from_dict(cls, d, path=None):
        shapes = {"g": (3, 3), "g_inv": (3, 3), "nu_ab": (3, 3), "nu_abc": (3, 3, 3),
                  "kappa3": (3, 3, 3), "v_coef": (3, 3, 3), "mu_coef": (3, 3, 3)}
        arrays = {}
        for key, shape in shapes.items():
            if key not in d:
                raise FormatError(f"missing field {key!r}", path)
            try:
                arr = np.asarray(d[key], dtype=np.float64)
            except (TypeError, ValueError):
                raise FormatError(f"field {key!r} is not numeric", path) from None
            if arr.shape != shape:
                raise FormatError(f"field {key!r} has shape {arr.shape}, expected {shape}", path)
            arrays[key] = arr
        try:
            t = float(d["t_horizon"])
            n = int(d["n_replications"])
        except (KeyError, TypeError, ValueError):
            raise FormatError("missing or invalid t_horizon / n_replications", path) from None
        return cls(t_horizon=t, n_replications=n, **arrays)

    def save(self, path):
        write_json(path, self.to_dict())

    @classmethod
    def load(cls, path):
        return cls.from_dict(read_json(path), path)


def collect_replication(events, theta0):
    T = events.horizon
    d = derivatives(events, theta0)
    return ReplicationStats(
        z1=d.score / np.sqrt(T),
        hess_t=d.hess / T,
        nu3=third_summands(events, theta0).nu3_path,
        horizon=T,
    )


def z_stats(rep, nu_ab):
    T = rep.horizon
    return ZStats(rep.z1, np.sqrt(T) * (rep.hess_t - nu_ab))


def estimate_coefficients(reps, t_horizon):
    """Two-pass estimate of every coefficient of the second-order density.

    ``reps`` must be in replication-index order; the result is then
    independent of how the replications were produced.
    """
    if len(reps) < 2:
        raise ValueError(f"need at least 10 replications, got {len(reps)}")
    Z = np.stack([r.z1 for r in reps])
    Hs = np.stack([r.hess_t for r in reps])
    N3 = np.stack([r.nu3 for r in reps])
    return estimate_from_arrays(Z, Hs, N3, t_horizon)


def estimate_from_arrays(Z, Hs, N3, t_horizon):
    """Array form of ``estimate_coefficients``: Z (R, 3), Hs (R, 3, 3), N3 (R, 3, 3, 3)."""
    R = len(Z)
    if R < 2:
        raise ValueError(f"need at least 10 replications, got {R}")
    if t_horizon <= 0:
        raise ValueError("t_horizon must be positive")
    sqrt_t = np.sqrt(t_horizon)

    nu_ab = Hs.mean(axis=0)
    nu_abc = N3.mean(axis=0)
    Z2 = sqrt_t * (Hs - nu_ab)

    g = np.cov(Z, rowvar=False, ddof=1)
    g = 0.5 * (g + g.T)
    eig = np.linalg.eigvalsh(g)
    if eig[0] <= 1e-12 * max(eig[-1], 0.0) or eig[0] <= 0:
        raise DegenerateInformationError(
            f"degenerate information: sample covariance of the score has eigenvalues {eig.tolist()}"
        )
    # rank deficiency is reported first, it is the more informative failure
    if R < 10:
        raise ValueError(f"need at least 10 replications, got {R}")
    g_inv = np.linalg.inv(g)
    g_inv = 0.5 * (g_inv + g_inv.T)

    Zu = Z @ g_inv  # Z^a = g^{ab} Z_b
    Zc = Zu - Zu.mean(axis=0)
    m3 = np.einsum("ra,rb,rc->abc", Zc, Zc, Zc) / R
    kappa3 = sqrt_t * m3 * (R * R / ((R - 1.0) * (R - 2.0)))

    Zu2 = np.einsum("ac,rcb->rab", g_inv, Z2)  # Z^a_b = g^{ac} Z_{cb}
    Zu2c = Zu2 - Zu2.mean(axis=0)
    cov = np.einsum("rab,rc->abc", Zu2c, Zc) / (R - 1.0)
    v_coef = np.einsum("abk,kc->abc", cov, g)
    nu_up = np.einsum("ab,bij->aij", g_inv, nu_abc)
    mu_coef = 0.5 * (v_coef + v_coef.transpose(0, 2, 1) + nu_up)

    return EdgeworthCoefficients(
        g=g, g_inv=g_inv, nu_ab=nu_ab, nu_abc=nu_abc, kappa3=kappa3,
        v_coef=v_coef, mu_coef=mu_coef, t_horizon=float(t_horizon), n_replications=R,
    )


def gaussian_density(z, sigma):
    """N(0, sigma) density at points ``z`` of shape (..., d)."""
    z = np.asarray(z, dtype=float)
    L = np.linalg.cholesky(sigma)
    d = L.shape[0]
    w = np.linalg.solve(L, z.reshape(-1, d).T)
    log_det = 2.0 * np.sum(np.log(np.diag(L)))
    quad = np.sum(w * w, axis=0)
    out = np.exp(-0.5 * quad - 0.5 * log_det - 0.5 * d * np.log(2.0 * np.pi))
    return out.reshape(z.shape[:-1])


def hermite(z, sigma, indices):
    """Multivariate Hermite polynomial h_A(z; sigma) for the index tuple A.

    Uses h_{A+a} = y_a h_A - sum_{b in A} P_{ab} h_{A-b} with y = P z,
    P = sigma^{-1}. ``z`` may carry leading batch dimensions.
    """
    z = np.asarray(z, dtype=float)
    P = np.linalg.inv(sigma)
    y = z @ P.T
    idx = tuple(indices)
    if len(idx) == 0:
        return np.ones(z.shape[:-1])
    if len(idx) == 1:
        return y[..., idx[0]]
    if len(idx) == 2:
        a, b = idx
        return y[..., a] * y[..., b] - P[a, b]
    if len(idx) == 3:
        a, b, c = idx
        return (y[..., a] * y[..., b] * y[..., c]
                - P[a, b] * y[..., c] - P[a, c] * y[..., b] - P[b, c] * y[..., a])
    *rest, a = idx
    out = y[..., a] * hermite(z, sigma, rest)
    for j, b in enumerate(rest):
        out = out - P[a, b] * hermite(z, sigma, rest[:j] + rest[j + 1:])
    return out


def q_t3(z, coeffs):
    """Second-order density at ``z`` (shape (3,) or (..., 3)). May be negative."""
    z = np.asarray(z, dtype=float)
    G = coeffs.g_inv
    P = coeffs.g
    y = z @ P.T
    c3 = coeffs.cubic_coef()
    c1 = coeffs.linear_coef()
    cubic = (np.einsum("abc,...a,...b,...c->...", c3, y, y, y)
             - np.einsum("abc,ab,...c->...", c3, P, y)
             - np.einsum("abc,ac,...b->...", c3, P, y)
             - np.einsum("abc,bc,...a->...", c3, P, y))
    linear = y @ c1
    corr = (cubic + linear) / np.sqrt(coeffs.t_horizon)
    return gaussian_density(z, G) * (1.0 + corr)


def normal_marginal(coord, z, coeffs):
    s = coeffs.g_inv[coord, coord]
    z = np.asarray(z, dtype=float)
    return np.exp(-0.5 * z * z / s) / np.sqrt(2.0 * np.pi * s)


def q_t3_marginal(coord, z, coeffs):
    """Closed-form marginal of ``q_t3`` in coordinate ``coord``.

    Mixed-index Hermite terms integrate out (they are derivatives in a
    marginalized coordinate); only the all-``coord`` terms remain.
    """
    s = coeffs.g_inv[coord, coord]
    z = np.asarray(z, dtype=float)
    c3 = coeffs.cubic_coef()[coord, coord, coord]
    c1 = coeffs.linear_coef()[coord]
    h1 = z / s
    h3 = z ** 3 / s ** 3 - 3.0 * z / s ** 2
    return normal_marginal(coord, z, coeffs) * (1.0 + (c3 * h3 + c1 * h1) / np.sqrt(coeffs.t_horizon))


def q_t3_marginal_cdf(coord, grid, coeffs, min_mass=0.999):
    """Monotone pseudo-CDF of the (possibly signed) marginal on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be a strictly increasing 1-D array")
    sd = np.sqrt(coeffs.g_inv[coord, coord])
    if grid[0] > -8.0 * sd or grid[-1] < 8.0 * sd:
        raise ValueError(f"grid too narrow: must span at least +-8 sd = +-{8.0 * sd:.6g}")
    F = cumulative_trapezoid(q_t3_marginal(coord, grid, coeffs), grid, initial=0.0)
    if F[-1] < min_mass:
        raise ValueError(f"grid too narrow: cumulative mass {F[-1]:.6g} < {min_mass}")
    F = np.clip(np.maximum.accumulate(F), 0.0, 1.0)
    return F / F[-1]
