import math

import numpy as np
import pytest
from scipy import stats

from hawkes_edgeworth import ExperimentConfig, Theta, run
from hawkes_edgeworth.experiment import GridCdf, ks_distance, qq_table, replication_seed

SMOKE = dict(theta0=Theta(0.5, 1.0, 1.3), t_horizon=5.0, mc_coeff=10, n_rep_mle=1, grid_points=16)


def normal_grid_cdf(sd=1.0):
    grid = np.linspace(-12 * sd, 12 * sd, 8001)
    return GridCdf(grid, stats.norm.cdf(grid, scale=sd))


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(mc_coeff=9)
    with pytest.raises(ValueError):
        ExperimentConfig(n_rep_mle=0)
    with pytest.raises(ValueError):
        ExperimentConfig(grid_points=15)
    with pytest.raises(ValueError):
        ExperimentConfig(theta0=Theta(0.5, 1.3, 1.3))
    with pytest.raises(ValueError, match="unknown config keys"):
        ExperimentConfig.from_mapping({"t_horizon": 30, "mc": 5})


def test_config_from_mapping():
    cfg = ExperimentConfig.from_mapping({
        "theta0": {"mu": 0.4, "alpha": 0.5, "beta": 2.0}, "t_horizon": 12, "mc_coeff": 20,
        "fit": {"lower": [1e-4, 1e-4, 1e-4], "max_iter": 50},
    })
    assert cfg.theta0 == Theta(0.4, 0.5, 2.0)
    assert cfg.t_horizon == 12.0
    assert cfg.fit_options.lower == (1e-4, 1e-4, 1e-4) and cfg.fit_options.max_iter == 50
    assert ExperimentConfig.from_mapping(cfg.to_dict()) == cfg


def test_replication_seeds_are_distinct():
    seeds = {replication_seed(1, i) for i in range(10_000)}
    assert len(seeds) == 10_000
    assert replication_seed(1, 5) == replication_seed(1, 5)
    assert replication_seed(1, 5) != replication_seed(2, 5)


def test_smoke_run(tmp_path):
    cfg = ExperimentConfig(**SMOKE, output_dir=str(tmp_path / "out"))
    res = run(cfg)
    files = {p.name for p in (tmp_path / "out").iterdir()}
    assert {"coeffs.json", "mle_samples.csv", "diagnostics.json", "config.json"} <= files
    for name in ("mu", "alpha", "beta"):
        assert f"density_{name}.csv" in files
        assert f"qq_{name}_normal.csv" in files and f"qq_{name}_qt3.csv" in files
    d = res.diagnostics
    assert d["n_rep_mle"] == 1
    assert d["n_kept"] + d["n_excluded"] == 1
    assert res.mle_samples.shape == (d["n_kept"], 3)


def test_qq_single_sample_is_median():
    cdf = normal_grid_cdf()
    t = qq_table([0.7], cdf)
    assert t.shape == (1, 2)
    assert t[0, 0] == 0.7
    assert t[0, 1] == pytest.approx(0.0, abs=1e-12)


def test_qq_self_consistency():
    n = 20_000
    x = np.random.default_rng(4).standard_normal(n)
    cdf = normal_grid_cdf()
    t = qq_table(x, cdf)
    # compare on the probability scale, where the Kolmogorov bound applies
    dev = np.max(np.abs(cdf(t[:, 0]) - cdf(t[:, 1])))
    assert dev <= 4 * 1.36 / math.sqrt(n)


def test_qq_monotone():
    x = np.random.default_rng(5).exponential(size=500)
    t = qq_table(x, normal_grid_cdf(2.0))
    assert np.all(np.diff(t[:, 0]) >= 0) and np.all(np.diff(t[:, 1]) >= 0)


def test_qq_rejects_empty():
    with pytest.raises(ValueError):
        qq_table([], normal_grid_cdf())


def test_ks_distance_matches_scipy():
    x = np.random.default_rng(6).normal(0.1, 1.0, size=300)
    ref = stats.kstest(x, "norm").statistic
    assert ks_distance(x, normal_grid_cdf()) == pytest.approx(ref, abs=1e-6)


def test_grid_cdf_quantile_inverts():
    cdf = normal_grid_cdf()
    p = np.array([0.01, 0.3, 0.5, 0.9])
    assert np.allclose(cdf(cdf.quantile(p)), p, atol=1e-6)


def test_outputs_independent_of_workers(tmp_path):
    base = dict(theta0=Theta(0.5, 1.0, 1.3), t_horizon=20.0, mc_coeff=60, n_rep_mle=40, grid_points=32)
    run(ExperimentConfig(**base, workers=1, output_dir=str(tmp_path / "w1")))
    run(ExperimentConfig(**base, workers=3, output_dir=str(tmp_path / "w3")))
    names = sorted(p.name for p in (tmp_path / "w1").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "w3").iterdir())
    for name in names:
        assert (tmp_path / "w1" / name).read_bytes() == (tmp_path / "w3" / name).read_bytes(), name
