"""End-to-end experiment: coefficients from MC paths, MLE replications,
density curves and Q-Q tables.

Every replication draws its path from a seed derived from
``(master_seed, replication_index)``; coefficient paths use indices
``0 .. mc_coeff-1`` and MLE paths ``mc_coeff .. mc_coeff+n_rep_mle-1``.
Results are reduced in index order, so outputs do not depend on ``workers``.
"""

import logging
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from ._io import write_csv, write_json
from .edgeworth import (
    PARAM_NAMES,
    collect_replication,
    estimate_coefficients,
    normal_marginal,
    q_t3_marginal,
    q_t3_marginal_cdf,
)
from .errors import NonConvergenceError
from .mle import FitOptions, fit
from .sim import Theta, simulate

log = logging.getLogger(__name__)

DENSITY_SPAN_SD = 6.0
CDF_SPAN_SD = 12.0
CDF_GRID_POINTS = 8001
MAX_FAIL_FRACTION = 0.05
REFERENCES = ("normal", "qt3")


@dataclass(frozen=True)
class ExperimentConfig:
    theta0: Theta = Theta(0.5, 1.0, 1.3)
    t_horizon: float = 30.0
    mc_coeff: int = 5000
    n_rep_mle: int = 3000
    master_seed: int = 20240101
    output_dir: str = None
    grid_points: int = 512
    workers: int = 1
    fit_options: FitOptions = field(default_factory=FitOptions)

    def __post_init__(self):
        if self.mc_coeff < 10:
            raise ValueError("mc_coeff must be at least 10")
        if self.n_rep_mle < 1:
            raise ValueError("n_rep_mle must be at least 1")
        if self.grid_points < 16:
            raise ValueError("grid_points must be at least 16")
        if not self.t_horizon > 0:
            raise ValueError("t_horizon must be positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.theta0.alpha >= self.theta0.beta:
            raise ValueError("theta0 must satisfy alpha < beta")

    def to_dict(self):
        return {
            "theta0": self.theta0.to_dict(),
            "t_horizon": float(self.t_horizon),
            "mc_coeff": int(self.mc_coeff),
            "n_rep_mle": int(self.n_rep_mle),
            "master_seed": int(self.master_seed),
            "grid_points": int(self.grid_points),
            "fit": {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self.fit_options).items()},
        }

    @classmethod
    def from_mapping(cls, d):
        """Build from a parsed TOML/JSON mapping; unknown keys are rejected."""
        d = dict(d)
        known = {"theta0", "t_horizon", "mc_coeff", "n_rep_mle", "master_seed",
                 "output_dir", "grid_points", "workers", "fit"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        if "theta0" in d:
            kwargs["theta0"] = Theta(**d["theta0"])
        for key, conv in (("t_horizon", float), ("mc_coeff", int), ("n_rep_mle", int),
                          ("master_seed", int), ("grid_points", int), ("workers", int)):
            if key in d:
                kwargs[key] = conv(d[key])
        if "output_dir" in d:
            kwargs["output_dir"] = str(d["output_dir"])
        if "fit" in d:
            fo = dict(d["fit"])
            for key in ("lower", "upper"):
                if key in fo:
                    fo[key] = tuple(float(v) for v in fo[key])
            kwargs["fit_options"] = FitOptions(**fo)
        return cls(**kwargs)


@dataclass
class ExperimentResult:
    coeffs: object
    mle_samples: np.ndarray
    mle_rep_index: np.ndarray
    density_curves: dict
    qq_tables: dict
    diagnostics: dict


@dataclass(frozen=True)
class GridCdf:
    """Nondecreasing CDF tabulated on a grid, with linear interpolation."""

    grid: np.ndarray
    values: np.ndarray

    def __call__(self, x):
        return np.interp(x, self.grid, self.values, left=0.0, right=1.0)

    def quantile(self, p):
        F = self.values
        keep = np.concatenate([[True], np.diff(F) > 0])
        return np.interp(p, F[keep], self.grid[keep])


def replication_seed(master_seed, index):
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _coeff_chunk(theta0, horizon, master_seed, indices):
    return [collect_replication(simulate(theta0, horizon, replication_seed(master_seed, i)), theta0)
            for i in indices]


def _mle_chunk(theta0, horizon, master_seed, indices, fit_options):
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for i in indices:
            events = simulate(theta0, horizon, replication_seed(master_seed, i))
            if len(events) == 0:
                out.append((i, np.full(3, np.nan), False, False, False, 0))
                continue
            f = fit(events, opts=fit_options)
            out.append((i, f.theta_hat.as_array(), f.converged, f.boundary_hit, f.supercritical, f.iterations))
    return out


def _chunks(indices, n_chunks):
    indices = list(indices)
    size = max(1, -(-len(indices) // n_chunks))
    return [indices[k:k + size] for k in range(0, len(indices), size)]


def _parallel_map(func, args_list, workers):
    """Ordered map; result order follows ``args_list`` regardless of workers."""
    if workers <= 1 or len(args_list) <= 1:
        return [func(*args) for args in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(func, *args) for args in args_list]
        return [fut.result() for fut in futures]


def estimate_from_simulation(theta0, t_horizon, mc_coeff, master_seed, workers=1, start_index=0):
    """Simulate ``mc_coeff`` paths and estimate the Edgeworth coefficients."""
    idx = range(start_index, start_index + mc_coeff)
    jobs = [(theta0, t_horizon, master_seed, c) for c in _chunks(idx, 4 * workers)]
    reps = [r for chunk in _parallel_map(_coeff_chunk, jobs, workers) for r in chunk]
    return estimate_coefficients(reps, t_horizon)


def density_curves(coeffs, grid_points=512, span_sd=DENSITY_SPAN_SD):
    """Per parameter: columns z, normal marginal, second-order marginal."""
    curves = {}
    for a, name in enumerate(PARAM_NAMES):
        sd = np.sqrt(coeffs.g_inv[a, a])
        z = np.linspace(-span_sd * sd, span_sd * sd, grid_points)
        curves[name] = np.column_stack([z, normal_marginal(a, z, coeffs), q_t3_marginal(a, z, coeffs)])
    return curves


def reference_cdfs(coeffs, coord):
    sd = np.sqrt(coeffs.g_inv[coord, coord])
    grid = np.linspace(-CDF_SPAN_SD * sd, CDF_SPAN_SD * sd, CDF_GRID_POINTS)
    return {
        "normal": GridCdf(grid, stats.norm.cdf(grid, scale=sd)),
        "qt3": GridCdf(grid, q_t3_marginal_cdf(coord, grid, coeffs)),
    }


def qq_table(samples, cdf):
    """Order statistics paired with reference quantiles at (i - 0.5)/n."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("need at least one sample")
    p = (np.arange(1, n + 1) - 0.5) / n
    return np.column_stack([x, cdf.quantile(p)])


def ks_distance(samples, cdf):
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    F = cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def run(config):
    """Run the full pipeline; writes the output directory when configured."""
    theta0, T = config.theta0, config.t_horizon
    log.info("estimating coefficients from %d paths at T=%g", config.mc_coeff, T)
    coeffs = estimate_from_simulation(theta0, T, config.mc_coeff, config.master_seed, config.workers)

    start = config.mc_coeff
    idx = range(start, start + config.n_rep_mle)
    jobs = [(theta0, T, config.master_seed, c, config.fit_options) for c in _chunks(idx, 4 * config.workers)]
    log.info("fitting %d MLE replications", config.n_rep_mle)
    fits = [r for chunk in _parallel_map(_mle_chunk, jobs, config.workers) for r in chunk]

    rep = np.array([f[0] - start for f in fits], dtype=np.int64)
    est = np.array([f[1] for f in fits])
    converged = np.array([f[2] for f in fits], dtype=bool)
    boundary = np.array([f[3] for f in fits], dtype=bool)
    supercritical = np.array([f[4] for f in fits], dtype=bool)
    keep = converged & ~boundary
    n_fail = int(np.sum(~converged & ~boundary))
    diagnostics = {
        "n_rep_mle": int(config.n_rep_mle),
        "n_kept": int(np.sum(keep)),
        "n_excluded": int(np.sum(~keep)),
        "n_failed": n_fail,
        "n_boundary_hits": int(np.sum(boundary)),
        "n_supercritical": int(np.sum(supercritical)),
        "mean_iterations": float(np.mean([f[5] for f in fits])),
    }
    # boundary maximizers are legitimate optima of the likelihood: excluded
    # from the samples but not counted as failures
    if n_fail > MAX_FAIL_FRACTION * config.n_rep_mle:
        raise NonConvergenceError(
            f"{n_fail} of {config.n_rep_mle} MLE fits failed to converge "
            f"(limit {MAX_FAIL_FRACTION:.0%})"
        )

    samples = np.sqrt(T) * (est[keep] - theta0.as_array())
    curves = density_curves(coeffs, config.grid_points)
    qq = {}
    ks = {}
    gaps = {}
    for a, name in enumerate(PARAM_NAMES):
        refs = reference_cdfs(coeffs, a)
        ks[name] = {}
        for ref in REFERENCES:
            if samples.shape[0] == 0:
                qq[(name, ref)] = np.empty((0, 2))
                ks[name][ref] = None
                continue
            qq[(name, ref)] = qq_table(samples[:, a], refs[ref])
            ks[name][ref] = ks_distance(samples[:, a], refs[ref])
        gaps[name] = float(np.max(np.abs(curves[name][:, 2] - curves[name][:, 1])))
    diagnostics["ks_distance"] = ks
    diagnostics["sup_gap_qt3_vs_normal"] = gaps
    if samples.shape[0] > 1:
        diagnostics["sample_mean"] = dict(zip(PARAM_NAMES, samples.mean(axis=0).tolist()))
        diagnostics["sample_sd"] = dict(zip(PARAM_NAMES, samples.std(axis=0, ddof=1).tolist()))

    result = ExperimentResult(coeffs, samples, rep[keep], curves, qq, diagnostics)
    if config.output_dir is not None:
        write_outputs(result, config)
    return result


def write_outputs(result, config, out_dir=None):
    out = Path(out_dir or config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    result.coeffs.save(out / "coeffs.json")
    write_csv(out / "mle_samples.csv", ["rep", "dmu", "dalpha", "dbeta"],
              ([int(r), *row] for r, row in zip(result.mle_rep_index, result.mle_samples)))
    write_density_csvs(result.density_curves, out)
    for (name, ref), table in result.qq_tables.items():
        write_csv(out / f"qq_{name}_{ref}.csv", ["empirical", "theoretical"], table)
    for a, name in enumerate(PARAM_NAMES):
        x = result.mle_samples[:, a]
        if x.size < 2 or np.ptp(x) == 0:
            continue
        dens, edges = np.histogram(x, bins="fd", density=True)
        write_csv(out / f"hist_{name}.csv", ["left", "right", "density"],
                  zip(edges[:-1], edges[1:], dens))
    write_json(out / "diagnostics.json", result.diagnostics)
    write_json(out / "config.json", config.to_dict())
    return out


def write_density_csvs(curves, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, table in curves.items():
        write_csv(out / f"density_{name}.csv", ["z", "normal", "qt3"], table)


def default_workers():
    value = os.environ.get("HAWKES_EDGEWORTH_THREADS")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            log.warning("ignoring non-integer HAWKES_EDGEWORTH_THREADS=%r", value)
    return 1
