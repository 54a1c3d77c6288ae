import csv
import functools
import io
import json
import math
import os
from fractions import Fraction

import pytest

from padic_levy import charfn as cf
from padic_levy import cli
from padic_levy.field import FieldSpec
from padic_levy.measure import StepMeasure, ball_integral_closed_form, measure_to_json
from padic_levy.verify import run_suite

Q2 = FieldSpec(2)
HALF = Q2.vector(Fraction(1, 2))


def write_config(tmp_path, d, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(d, indent=1))
    return str(path)


def poisson_config(**extra):
    tr = cf.poisson_triplet(HALF, 1.0)
    d = {"field": Q2.to_json(), "triplet": cf.triplet_to_json(tr), "grid": ["0|1|32"], "t": [1.0], "seed": 3}
    d.update(extra)
    return d


def read_csv(path):
    lines = open(path).read().splitlines()
    assert lines[0].startswith("# seed=")
    return lines[0], list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_eval_poisson_row(tmp_path):
    out = tmp_path / "eval.csv"
    assert cli.main(["eval", "--config", write_config(tmp_path, poisson_config()), "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert "seed=3" in header and "config_sha256=" in header
    assert rows[0]["y"] == "0|1|32"
    assert float(rows[0]["re_psi"]) == pytest.approx(math.exp(-2), abs=1e-12)
    assert abs(float(rows[0]["im_psi"])) < 1e-12


def test_eval_pure_drift_has_unit_modulus(tmp_path):
    tr = cf.LevyTriplet(drift=cf.KDrift(Q2.vector(Fraction(3, 8)), 1.3))
    d = {"field": Q2.to_json(), "triplet": cf.triplet_to_json(tr), "grid": {"radius": 2, "depth": 3},
         "t": [0.5, 1.0, 2.0]}
    out = tmp_path / "drift.csv"
    assert cli.main(["eval", "--config", write_config(tmp_path, d), "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert len(rows) == 3 * 2 ** 3
    assert all(abs(float(r["abs_psi"]) - 1) < 1e-12 for r in rows)


def test_eval_empty_grid_is_header_only(tmp_path):
    out = tmp_path / "empty.csv"
    assert cli.main(["eval", "--config", write_config(tmp_path, poisson_config(grid=[])), "--out", str(out)]) == 0
    lines = open(out).read().splitlines()
    assert len(lines) == 2 and lines[1] == "t,y,re_psi,im_psi,abs_psi"


def test_grid_generator_announces_count(tmp_path, capsys):
    path = write_config(tmp_path, poisson_config())
    cli.main(["eval", "--config", path, "--grid-radius", "1", "--grid-depth", "2", "--out", str(tmp_path / "g.csv")])
    assert "4 grid points" in capsys.readouterr().err


def test_outputs_are_reproducible(tmp_path):
    lam = measure_to_json(StepMeasure.dirac(HALF))
    d = poisson_config(sample={"w": 2.0, "t": 1.5, "paths": 5, "lam": lam})
    path = write_config(tmp_path, d)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert cli.main(["sample", "--config", path, "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    cli.main(["sample", "--config", path, "--seed", "4", "--out", str(c)])
    assert c.read_bytes() != a.read_bytes()


def test_sample_at_time_zero_is_single_row(tmp_path):
    lam = measure_to_json(StepMeasure.dirac(HALF))
    d = poisson_config(sample={"w": 1.0, "t": 0.0, "paths": 4, "lam": lam})
    out = tmp_path / "paths.csv"
    assert cli.main(["sample", "--config", write_config(tmp_path, d), "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert [r["path"] for r in rows] == ["0", "1", "2", "3"]
    assert all(r["value"] == "inf||32" for r in rows)


def test_limit_table(tmp_path):
    lam = measure_to_json(StepMeasure.dirac(HALF))
    d = poisson_config(limit={"w": 1.0, "t": 1.0, "n": 5000, "lam": lam}, grid={"radius": 2, "depth": 2})
    out = tmp_path / "limit.csv"
    rc = cli.main(["limit", "--config", write_config(tmp_path, d), "--m", "1,4,16,64,256,1024", "--out", str(out)])
    assert rc == 0
    _, rows = read_csv(out)
    assert [int(r["m"]) for r in rows] == [1, 4, 16, 64, 256, 1024]
    assert all(r["non_increasing_ok"] == "1" for r in rows)


def test_integrals_table(tmp_path):
    d = poisson_config(integrals={"primes": [2, 3], "k": [-2, -1, 0, 1, 2], "dims": [1, 2]})
    out = tmp_path / "integrals.csv"
    assert cli.main(["integrals", "--config", write_config(tmp_path, d), "--out", str(out)]) == 0
    _, rows = read_csv(out)
    tables = {r["table"] for r in rows}
    assert tables == {"ball_character", "unit_ball_A", "unit_ball_B"}
    assert max(float(r["gap"]) for r in rows if r["table"] == "ball_character") <= 1e-12
    assert max(float(r["gap"]) for r in rows) <= 1e-9


def test_verify_field_suite(tmp_path):
    out = tmp_path / "verify.json"
    assert cli.main(["verify", "--suite", "field", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["passed"] and report["suite"] == "field"
    assert all(c["passed"] for c in report["checks"])


def test_corrupted_ball_constant_is_caught(tmp_path, monkeypatch):
    def corrupted(s, k, n=None):
        return ball_integral_closed_form(s, k, n) * Fraction(3, 2)

    report = run_suite("measure", closed_form=corrupted)
    assert not report["passed"]
    failed = [c for c in report["checks"] if not c["passed"]]
    payload = failed[0]["counterexample"]
    assert {"p", "n", "k", "s"} <= set(payload)
    monkeypatch.setattr(cli, "run_suite", functools.partial(run_suite, closed_form=corrupted))
    assert cli.main(["verify", "--suite", "measure", "--out", str(tmp_path / "bad.json")]) == 1


def test_config_round_trip():
    lam = measure_to_json(StepMeasure.dirac(HALF))
    d = poisson_config(sample={"w": 1.0, "t": 1.0, "paths": 2, "lam": lam}, integrals={"primes": [2]})
    cfg = cli.RunConfig.from_json(d)
    again = cli.RunConfig.from_json(cfg.to_json())
    assert again.to_json() == cfg.to_json()
    assert again.digest() == cfg.digest()


def test_json_syntax_error_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "field": {"p": 2},\n  "t": [1.0,]\n}\n')
    assert cli.main(["eval", "--config", str(path)]) == 2
    assert f"{path}:3:" in capsys.readouterr().err


def test_validation_errors_leave_no_output(tmp_path, capsys):
    out = tmp_path / "never.csv"
    cases = [
        {"field": {"p": 4}},
        poisson_config(grid=["0|1 2|32"]),
        poisson_config(t=[-1.0]),
        poisson_config(bogus=1),
        {"field": Q2.to_json()},
    ]
    for d in cases:
        assert cli.main(["eval", "--config", write_config(tmp_path, d), "--out", str(out)]) == 2
        assert not out.exists()
    assert not [f for f in os.listdir(tmp_path) if f.endswith(".tmp")]
    assert "config error" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert cli.main(["eval", "--config", str(tmp_path / "absent.json")]) == 2


def test_console_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "padic_levy", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for name in ("eval", "verify", "sample", "limit", "integrals"):
        assert name in res.stdout


def test_config_accepts_text_points(tmp_path):
    d = poisson_config()
    d["triplet"]["jump"]["atoms"][0]["point"] = ["-1|1|32"]
    out = tmp_path / "text.csv"
    assert cli.main(["eval", "--config", write_config(tmp_path, d), "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert float(rows[0]["re_psi"]) == pytest.approx(math.exp(-2), abs=1e-12)
