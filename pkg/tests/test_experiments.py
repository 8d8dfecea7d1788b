import json

import numpy as np
import pytest

from cadlag_limits import ExperimentConfig, Report, run_experiment
from cadlag_limits.experiments import (
    THREADS_ENV,
    counterexample_replication,
    frechet_cdf,
    median_stderr,
    nu_closed_form_iid,
)
from cadlag_limits.models import ModelConfig, simulate


def small(**kw):
    base = dict(replications=20, n_grid=[1000], seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig("bogus")
    with pytest.raises(ValueError):
        ExperimentConfig("convergence", replications=0)
    with pytest.raises(ValueError):
        ExperimentConfig("convergence", n_grid=[1000, 100])
    with pytest.raises(ValueError):
        ExperimentConfig("convergence", n_grid=[])
    with pytest.raises(ValueError):
        ExperimentConfig("convergence", alpha=2.5)


def test_config_roundtrip(tmp_path):
    cfg = small(experiment="theta_study", model="lagged", q=1, thresholds={"theta_tol": 0.1})
    assert cfg.thresholds["theta_tol"] == 0.1 and cfg.thresholds["ks_max"] == 0.05
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.from_json_file(p) == cfg
    assert ExperimentConfig.from_json_file(p, seed=9).seed == 9


def test_wrong_model_rejected():
    with pytest.raises(ValueError):
        run_experiment(small(experiment="counterexample", model="iid_pareto"))
    with pytest.raises(ValueError):
        run_experiment(small(experiment="convergence", model="sre"))


def test_single_replication_is_flagged():
    rep = run_experiment(small(experiment="convergence", model="iid_symmetric_pareto", replications=1))
    assert rep.inconclusive
    assert rep.exit_code() == 2
    assert any("stderr undefined" in n for n in rep.notes)
    assert all(r.passed is None for r in rep.rows if r.criterion)


def test_report_csv_and_files(tmp_path):
    rep = run_experiment(small(experiment="theta_study", model="lagged", q=1, u_grid=[1.0]))
    lines = rep.to_csv().splitlines()
    assert lines[0] == "experiment,model,alpha,n,statistic,value,stderr,criterion,passed"
    rep.write(tmp_path)
    assert (tmp_path / "report.csv").read_text() == rep.to_csv()
    meta = json.loads((tmp_path / "report.json").read_text())["metadata"]
    assert meta["seed"] == 3 and "wall_time_s" in meta and "version" in meta
    assert (tmp_path / "plotdata" / "theta.csv").exists()


def test_criteria_unique():
    rep = Report("x")
    rep.add(model="m", alpha=1.0, n=1, statistic="s", value=0.0, criterion="AC1", passed=True)
    with pytest.raises(ValueError):
        rep.add(model="m", alpha=1.0, n=1, statistic="s", value=0.0, criterion="AC1", passed=True)
    assert rep.exit_code() == 0
    rep.add(model="m", alpha=1.0, n=1, statistic="t", value=1.0, criterion="AC2", passed=False)
    assert rep.exit_code() == 1


@pytest.mark.parametrize("exp,kw", [
    ("convergence", dict(model="lagged", q=1)),
    ("counterexample", dict(model="lagged", q=1, n_grid=[100, 1000])),
    ("cluster_study", dict(model="iid_pareto")),
    ("diagnostics", dict(model="sre", d=2, burn_in=200)),
])
def test_determinism_and_threads(exp, kw, monkeypatch):
    cfg = small(experiment=exp, **kw)
    a = run_experiment(cfg).to_csv()
    monkeypatch.setenv(THREADS_ENV, "3")
    b = run_experiment(cfg).to_csv()
    assert a == b


def test_counterexample_replication_statistics():
    s = simulate(ModelConfig(1.5, "lagged", 5000, q=1, seed=2))
    out = counterexample_replication(s, 1e-4)
    a = 5000 ** (1 / 1.5)
    z = s.values[:, 0]
    z0 = s.values[0, 1]
    assert out["sup"] == pytest.approx(max(0.0, (z.max() - z0) / a))
    assert out["fidi_0.5"] == pytest.approx(abs(z[2499] - z0) / a)
    assert out["strong_lb"] == pytest.approx(out["sup"] / 2, abs=1e-4)
    assert out["dp"] <= out["sup"]


def test_helpers():
    assert frechet_cdf(1.5)(np.array([-1.0, 0.0, 1.0]))[2] == pytest.approx(np.exp(-1))
    np.testing.assert_allclose(nu_closed_form_iid(1.5, 0.5, [0.25, 0.5, 1.0]), [0.5**-1.5, 0.5**-1.5, 1.0])
    x = np.random.default_rng(0).normal(size=4000)
    assert median_stderr(x) == pytest.approx(1.2533 / np.sqrt(4000), rel=0.2)
    assert np.isnan(median_stderr([1.0]))


def test_diagnostics_rows():
    rep = run_experiment(small(experiment="diagnostics", model="iid_pareto", alpha=0.5, u=0.5,
                               u_grid=[0.01, 0.1, 0.5], nu_n=200_000, nu_exceed_prob=0.05))
    crit = rep.criteria()
    assert "AC8[alpha=0.5,u=0.5,n=1000]" in crit
    karamata = [r for r in rep.rows if r.statistic == "karamata_u0.5"][0]
    from cadlag_limits import karamata_ratio

    assert karamata.value == karamata_ratio(0.5, 0.5, 1000)
    assert {"AC7[x=1u]", "AC7[x=2u]", "AC7[x=4u]"} <= set(crit)


def test_lagged_anticluster_vanishes_beyond_q():
    # beyond lag q only independent exceedances remain, about 2 r_n C / n = 0.04 here
    rep = run_experiment(small(experiment="diagnostics", model="lagged", q=1, n_grid=[100_000], u=1.0,
                               replications=40, m_grid=[1, 2, 5]))
    vals = {r.statistic: r.value for r in rep.rows}
    assert vals["anticluster_m2"] < 0.1 and vals["anticluster_m5"] < 0.1
    assert vals["anticluster_m1"] > 0.9
