import json
import subprocess
import sys

import numpy as np
import pytest

from maxdist.cli import main, points_from_csv, points_to_csv
from maxdist.diameter import diameter_pruned
from maxdist.radial_models import normal_model, sample_points
from maxdist.rng import make_stream

NORMAL2 = json.dumps({"family": "gamma_tail", "d": 2, "alpha": 0, "beta": 0.5, "gamma": 2})
SPHERE2 = json.dumps({"family": "bounded", "d": 2, "kind": "uniform-sphere"})


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sample_shape(capsys):
    code, out, _ = run(capsys, "sample", "--model", NORMAL2, "--n", "3", "--seed", "5")
    assert code == 0
    rows = out.strip().splitlines()
    assert len(rows) == 3 and all(len(r.split(",")) == 2 for r in rows)


def test_sample_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert run(capsys, "sample", "--model", NORMAL2, "--n", "50", "--seed", "9", "--out", str(p))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_sample_round_trips_17_digits():
    x = make_stream(1).standard_normal((20, 3))
    assert np.array_equal(points_from_csv(points_to_csv(x)), x)


def test_sample_then_diameter(tmp_path, capsys):
    path = tmp_path / "pts.csv"
    run(capsys, "sample", "--model", NORMAL2, "--n", "400", "--seed", "4", "--out", str(path))
    code, out, _ = run(capsys, "diameter", "--input", str(path))
    assert code == 0
    got = json.loads(out)
    ref = diameter_pruned(sample_points(normal_model(2), 400, make_stream(4)))
    assert got["value"] == ref.value and (got["i"], got["j"]) == ref.pair
    assert got["comparisons"] == ref.comparisons
    code, out, _ = run(capsys, "diameter", "--input", str(path), "--naive")
    assert json.loads(out)["value"] == ref.value


def test_normalize_normal(capsys):
    code, out, _ = run(capsys, "normalize", "--model", NORMAL2, "--n", "1000000")
    assert code == 0
    assert json.loads(out)["scale"] == pytest.approx(0.1902399, abs=5e-8)


def test_normalize_sphere(capsys):
    code, out, _ = run(capsys, "normalize", "--model", SPHERE2, "--n", "2000")
    data = json.loads(out)
    assert data["exponent"] == 4.0
    assert data["survival_constant"] == pytest.approx(1 / np.pi, rel=1e-14)


def test_normalize_model_from_file(tmp_path, capsys):
    p = tmp_path / "m.json"
    p.write_text(NORMAL2)
    assert run(capsys, "normalize", "--model", str(p), "--n", "1000")[0] == 0
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"model": json.loads(NORMAL2), "n": 1000}))
    assert run(capsys, "normalize", "--config", str(cfg))[0] == 0


def test_guard_exit_code(capsys):
    code, _, err = run(capsys, "normalize", "--model", NORMAL2, "--n", "2")
    assert code == 3
    assert "logloglog" in err


def test_io_exit_code(tmp_path, capsys):
    assert run(capsys, "diameter", "--input", str(tmp_path / "missing.csv"))[0] == 2
    assert run(capsys, "sample", "--model", NORMAL2, "--n", "3", "--out", str(tmp_path / "no" / "x.csv"))[0] == 2


def test_config_exit_codes(capsys):
    assert run(capsys, "normalize", "--model", "{not json", "--n", "100")[0] == 4
    assert run(capsys, "normalize", "--model", '{"family": "unknown", "d": 2}', "--n", "100")[0] == 4
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 4
    assert "invalid choice" in capsys.readouterr().err


def test_simulate_json_and_csv(tmp_path, capsys):
    cfg = {
        "experiment": "gumbel",
        "model": json.loads(NORMAL2),
        "n_values": [300],
        "replications": 5,
        "seed": 2,
    }
    p = tmp_path / "exp.json"
    p.write_text(json.dumps(cfg))
    code, out, _ = run(capsys, "simulate", "--config", str(p), "--threads", "1")
    assert code == 0
    report = json.loads(out)
    assert report["experiment"] == "gumbel" and report["results"][0]["n"] == 300
    code, out2, _ = run(capsys, "simulate", "--config", str(p), "--threads", "3")
    assert out2 == out
    code, csv_out, _ = run(capsys, "simulate", "--config", str(p), "--format", "csv")
    assert csv_out.splitlines()[0] == "n,rep,stat_name,value"


def test_simulate_flags_only(capsys):
    code, out, _ = run(
        capsys, "simulate", "--experiment", "poisson_count", "--model", NORMAL2, "--n", "2000", "--reps", "3"
    )
    assert code == 0
    assert json.loads(out)["config"]["n_values"] == [2000]


def test_simulate_missing_fields(capsys):
    assert run(capsys, "simulate", "--experiment", "gumbel", "--model", NORMAL2)[0] == 4


def test_verify_pass_and_fail(capsys, monkeypatch):
    code, out, _ = run(capsys, "verify", "constants")
    card = json.loads(out)
    assert code == 0 and card["passed"] and len(card["criteria"]) >= 3
    for c in card["criteria"]:
        assert {"name", "measured", "threshold", "passed"} <= set(c)

    from maxdist import verify

    monkeypatch.setitem(verify.SUITES, "constants", lambda **_: [verify.Criterion("always", 1, "< 0", False)])
    assert run(capsys, "verify", "constants")[0] == 1


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "maxdist", "normalize", "--model", NORMAL2, "--n", "1000"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 1000
