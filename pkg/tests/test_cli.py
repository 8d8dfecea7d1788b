import csv
import io
import json

import pytest

from cadlag_limits import StepFunction
from cadlag_limits.cli import ESTIMATOR_COLUMNS, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def pair(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_text(StepFunction([0.0, 0.0], [0.3], [[1.0, 1.0]]).to_json())
    b.write_text(StepFunction([0.0, 0.0], [0.5], [[1.0, 1.0]]).to_json())
    return str(a), str(b)


def test_distance(capsys, pair):
    code, out, _ = run(capsys, "distance", "--metric", "wm1", "--tol", "1e-4", *pair)
    res = json.loads(out)
    assert code == 0
    assert res["lower_bound"] <= 0.2 <= res["upper_bound"]
    _, out, _ = run(capsys, "distance", "--metric", "uniform", *pair)
    assert json.loads(out)["value"] == 1.0
    _, out, _ = run(capsys, "distance", "--metric", "strong-lb", *pair)
    assert json.loads(out)["value"] == 0.0
    code, _, err = run(capsys, "distance", "--metric", "m1", *pair)
    assert code == 1 and "scalar" in err


def test_simulate_csv_and_json(capsys, tmp_path):
    code, out, _ = run(capsys, "simulate", "--model", "lagged", "--q", "1", "--alpha", "1.5", "--n", "5", "--seed", "2")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["x1", "x2"] and len(rows) == 6
    assert rows[2][1] == rows[1][0]
    f = tmp_path / "s.json"
    run(capsys, "simulate", "--alpha", "1.5", "--n", "4", "--format", "json", "--out", str(f))
    data = json.loads(f.read_text())
    assert len(data["values"]) == 4 and data["config"]["alpha"] == 1.5


def estimator_rows(out):
    rows = list(csv.DictReader(io.StringIO(out)))
    assert tuple(rows[0]) == ESTIMATOR_COLUMNS
    return rows


def test_estimator_commands(capsys, tmp_path):
    _, out, _ = run(capsys, "theta", "--model", "lagged", "--q", "1", "--alpha", "1.5", "--n", "100000", "--u", "0.1", "--r-n", "50")
    rows = estimator_rows(out)
    assert {r["estimator"] for r in rows} == {"theta_blocks", "theta_spectral"}
    assert abs(float(rows[0]["value"]) - 0.5) < 0.1
    win = tmp_path / "w.json"
    _, out, _ = run(capsys, "tailproc", "--alpha", "1.5", "--n", "10000", "--u", "0.5", "--windows", str(win))
    assert estimator_rows(out)[0]["estimator"] == "tail_windows"
    assert isinstance(json.loads(win.read_text()), list)
    _, out, _ = run(capsys, "nu", "--alpha", "1.5", "--n", "100000", "--threshold", "50", "--x", "0.5,1")
    assert len(estimator_rows(out)) == 2
    _, out, _ = run(capsys, "smalljump", "--alpha", "0.5", "--n", "1000", "--u", "0.1,0.5")
    assert len(estimator_rows(out)) == 2
    _, out, _ = run(capsys, "karamata", "--alpha", "0.25", "--n", "1000000", "--u", "0.5")
    assert abs(float(estimator_rows(out)[0]["value"]) - 1 / 3) < 0.02


def test_experiment_command(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "theta_study", "model": "lagged", "q": 1, "alpha": 1.5,
                               "replications": 30, "n_grid": [10000], "u_grid": [1.0]}))
    out = tmp_path / "out"
    code, _, _ = run(capsys, "theta_study", "--config", str(cfg), "--out", str(out))
    assert code == 0
    assert (out / "report.csv").exists() and (out / "report.json").exists()
    code, _, _ = run(capsys, "convergence", "--config", str(cfg), "--replications", "1")
    assert code == 2
    iid = tmp_path / "iid.json"
    iid.write_text(json.dumps({"experiment": "counterexample", "model": "iid_pareto", "alpha": 1.5}))
    code, _, err = run(capsys, "counterexample", "--config", str(iid))
    assert code == 1 and "lagged" in err
