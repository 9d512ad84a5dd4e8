from fractions import Fraction as Q
import csv
import json
import subprocess
import sys

import pytest

from roadcalc import cli
from roadcalc.bounds import AffineArrival, road_bounds
from roadcalc.config import ConfigError, example1, parse
from roadcalc.road import example_road, fundamental_flow


def small(**sim):
    doc = example1()
    doc["sim"].update(dict(runs=5, horizon="40", densities=["1/6"], couples=["relaxed"]), **sim)
    return doc


def run(tmp_path, doc, command, *extra):
    cfg = tmp_path / "scenario.json"
    cfg.write_text(json.dumps(doc))
    out = tmp_path / "out"
    return cli.main([command, "--config", str(cfg), "--out", str(out), "-q", *extra]), out


def test_curves_and_bounds_outputs(tmp_path):
    code, out = run(tmp_path, small(), "curves")
    assert code == cli.OK
    assert {p.name for p in out.iterdir()} == {
        "curves_rho_1-6.csv", "curves_rho_1-3.csv", "curves_rho_1-2.csv", "curves.json", "curves.svg"
    }
    code, out = run(tmp_path, small(), "bounds")
    assert code == cli.OK
    assert (out / "bounds.svg").read_bytes().startswith(b"<?xml")


def test_csv_round_trip_to_twelve_digits(tmp_path):
    doc = small()
    doc["sweep"]["rho"] = ["1/7", "2/7", "3/7", "1/3"]
    code, out = run(tmp_path, doc, "bounds")
    assert code == cli.OK
    road = example_road()
    rows = list(csv.DictReader(open(out / "bounds.csv")))
    for row in rows:
        rho = Q(row["rho"]).limit_denominator(100)
        # arrival A: no burst, half the road's flow
        rep = road_bounds(road, rho, AffineArrival(0, fundamental_flow(road, rho) / 2))
        assert float(row["tau_max"]) == pytest.approx(float(rep.tau_max), rel=1e-12)
        assert float(row["b_max"]) == pytest.approx(float(rep.b_max), rel=1e-12)


def test_outputs_are_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    for cmd in ("curves", "bounds", "simulate"):
        assert run(a, small(), cmd)[0] == cli.OK
        assert run(b, small(), cmd)[0] == cli.OK
    fa = sorted(p.name for p in (a / "out").iterdir())
    assert fa == sorted(p.name for p in (b / "out").iterdir())
    for name in fa:
        assert (a / "out" / name).read_bytes() == (b / "out" / name).read_bytes(), name


def test_simulate_exit_codes(tmp_path):
    code, out = run(tmp_path, small(), "simulate")
    assert code == cli.OK
    summary = json.loads((out / "simulate.json").read_text())
    assert summary["cases"][0]["couple_violations"] == 0
    code, _ = run(tmp_path, small(), "simulate", "--negative-control")
    assert code == cli.VIOLATION


def test_bad_configs_exit_3(tmp_path):
    doc = small()
    doc["roads"]["ring"]["m"] = 2
    assert run(tmp_path, doc, "curves")[0] == cli.BAD_CONFIG
    doc = small()
    doc["sweep"]["rho"] = ["half"]
    assert run(tmp_path, doc, "curves")[0] == cli.BAD_CONFIG
    (tmp_path / "broken.json").write_text("{not json")
    assert cli.main(["curves", "--config", str(tmp_path / "broken.json"), "-q"]) == cli.BAD_CONFIG
    assert cli.main(["curves", "--config", str(tmp_path / "missing.json"), "-q"]) == cli.BAD_CONFIG


def test_unwritable_output_exits_1(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = tmp_path / "scenario.json"
    cfg.write_text(json.dumps(small()))
    assert cli.main(["bounds", "--config", str(cfg), "--out", str(blocker / "sub"), "-q"]) == cli.IO_ERROR


def test_empty_sweep_and_zero_horizon_only_warn(tmp_path, caplog):
    doc = small(horizon="0")
    doc["sweep"]["rho"] = []
    assert run(tmp_path, doc, "curves")[0] == cli.OK
    assert run(tmp_path, doc, "simulate")[0] == cli.OK


def test_grid_sweep():
    doc = example1()
    del doc["sweep"]["rho"]
    doc["sweep"]["grid"] = 4
    assert parse(doc).sweep.rho == [Q(1, 4), Q(1, 2), Q(3, 4)]


def test_parse_rejects_unknown_references():
    doc = example1()
    doc["sweep"]["road"] = "nowhere"
    with pytest.raises(ConfigError):
        parse(doc)


def test_console_entry_point(tmp_path):
    cfg = tmp_path / "scenario.json"
    cfg.write_text(json.dumps(small()))
    res = subprocess.run(
        [sys.executable, "-m", "roadcalc.cli", "bounds", "--config", str(cfg), "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0, res.stderr
