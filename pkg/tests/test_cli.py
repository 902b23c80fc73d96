import csv
import io
import json
import math

import pytest

import gravphase
from gravphase.cli import emit, run
from gravphase.units import DimensionlessParams
from gravphase.variance import phase_variance


def _json_records(capsys):
    out = capsys.readouterr().out
    return json.loads(out)


def _csv_records(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_variance_dimensionless_json(capsys):
    assert run(["variance", "--mu", "1", "--rho", "1", "--tau-max", "3"]) == 0
    recs = _json_records(capsys)
    assert len(recs) == 1
    rec = recs[0]
    expected = phase_variance(DimensionlessParams(1.0, 1.0, 3.0))
    # 17-significant-digit serialization preserves the double exactly
    assert rec["total"] == expected.total
    assert rec["i7"] == expected.i7
    assert rec["version"] == gravphase.__version__
    assert rec["seed"] is None


def test_variance_zero_separation(capsys):
    assert run(["variance", "--mu", "1", "--rho", "0", "--tau-max", "2"]) == 0
    assert _json_records(capsys)[0]["total"] == 0.0


def test_variance_si_mode(capsys):
    argv = [
        "variance", "--mass", "1e-16", "--width", "1e-6",
        "--separation", "1e-6", "--horizon", "100.0",
    ]
    assert run(argv) == 0
    rec = _json_records(capsys)[0]
    assert rec["mass"] == 1e-16
    assert rec["mu"] > 0 and rec["total"] > 0


def test_variance_mode_conflict(capsys):
    rc = run(["variance", "--mu", "1", "--rho", "1", "--tau-max", "1",
              "--mass", "1e-16"])
    assert rc == 2
    assert "not both" in capsys.readouterr().err


def test_variance_missing_flag(capsys):
    assert run(["variance", "--mu", "1", "--rho", "1"]) == 2
    assert "tau-max" in capsys.readouterr().err


def test_unknown_flag_exits_2(capsys):
    assert run(["variance", "--bogus", "1"]) == 2
    assert "usage" in capsys.readouterr().err.lower()


def test_no_subcommand_exits_2():
    assert run([]) == 2


def test_criteria_density_only(capsys):
    assert run(["criteria", "--density", "1000"]) == 0
    rec = _json_records(capsys)[0]
    assert 1e-18 <= rec["critical_mass"] <= 1e-16


def test_criteria_full_record(capsys):
    argv = ["criteria", "--mass", "1e-16", "--width", "1e-6",
            "--separation", "1e-6", "--density", "1000"]
    assert run(argv) == 0
    rec = _json_records(capsys)[0]
    for key in ("damping_time", "damping_time_short", "critical_length",
                "critical_mass", "regime"):
        assert key in rec
    assert rec["regime"] in ("Quantum", "Classical", "Boundary")


def test_criteria_requires_inputs(capsys):
    assert run(["criteria", "--threshold", "5"]) == 2


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nm = 1e-16\na = 1e-6\ndensity = 1000\n")
    assert run(["criteria", "--config", str(cfg)]) == 0
    base = _json_records(capsys)[0]
    assert base["density"] == 1000.0
    # explicit flag wins over the file value
    assert run(["criteria", "--config", str(cfg), "--density", "2000"]) == 0
    over = _json_records(capsys)[0]
    assert over["density"] == 2000.0
    assert over["critical_mass"] != base["critical_mass"]


def test_config_json_format(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"mu": 1.0, "rho": 1.0, "tau_max": 3.0}))
    assert run(["variance", "--config", str(cfg)]) == 0
    assert _json_records(capsys)[0]["tau_max"] == 3.0


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("mu = 1\nwibble = 2\n")
    assert run(["variance", "--config", str(cfg)]) == 2
    assert "wibble" in capsys.readouterr().err


def test_config_invalid_value_names_key(tmp_path, capsys):
    cfg = tmp_path / "neg.cfg"
    cfg.write_text("m = 1e-16\na = -1\ndensity = 1000\n")
    assert run(["criteria", "--config", str(cfg)]) == 2
    assert "a" in capsys.readouterr().err


def test_config_malformed_line(tmp_path, capsys):
    cfg = tmp_path / "broken.cfg"
    cfg.write_text("this is not a key value pair\n")
    assert run(["variance", "--config", str(cfg)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_config_missing_file(capsys):
    assert run(["variance", "--config", "/no/such/file.cfg"]) == 2


def test_csv_round_trip_bit_exact(tmp_path):
    out = tmp_path / "var.csv"
    argv = ["variance", "--mu", "3.7", "--rho", "1.3", "--tau-max", "2.1",
            "--format", "csv", "--output", str(out)]
    assert run(argv) == 0
    rows = _csv_records(out.read_text())
    assert len(rows) == 1
    expected = phase_variance(DimensionlessParams(3.7, 1.3, 2.1))
    assert float(rows[0]["total"]) == expected.total
    assert float(rows[0]["i8"]) == expected.i8
    assert float(rows[0]["mu"]) == 3.7


def test_output_determinism_modulo_timestamp(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["oracle", "--samples", "10000", "--seed", "42"]
    assert run(argv + ["--output", str(a)]) in (0, 1)
    assert run(argv + ["--output", str(b)]) in (0, 1)
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    for rec_a, rec_b in zip(ra, rb):
        rec_a.pop("timestamp"), rec_b.pop("timestamp")
        assert rec_a == rec_b


def test_oracle_small_run_passes(capsys):
    assert run(["oracle", "--samples", "20000", "--seed", "42"]) == 0
    recs = _json_records(capsys)
    assert {r["check"] for r in recs} == {
        "cancellation", "i4_closed_form", "i6_closed_form", "erf_identity"
    }
    assert all(r["passed"] for r in recs)
    assert all(r["seed"] == 42 for r in recs)


def test_sweep_rows_and_order(capsys):
    argv = ["sweep", "--param", "width", "--start", "1e-6", "--stop", "1e-5",
            "--num", "5", "--mass", "1e-16"]
    assert run(argv) == 0
    recs = _json_records(capsys)
    assert len(recs) == 5
    widths = [r["width"] for r in recs]
    assert widths == sorted(widths)
    assert widths[0] == pytest.approx(1e-6) and widths[-1] == pytest.approx(1e-5)


def test_sweep_conflicting_fixed_value(capsys):
    argv = ["sweep", "--param", "width", "--start", "1e-6", "--stop", "1e-5",
            "--num", "3", "--mass", "1e-16", "--width", "5e-6"]
    assert run(argv) == 2


def test_covariance_subcommand(capsys):
    argv = ["covariance", "--grid-n", "32", "--realizations", "200",
            "--seed", "42", "--format", "csv"]
    assert run(argv) == 0
    out = capsys.readouterr().out
    rows = _csv_records(out)
    assert len(rows) >= 2
    assert all(r["passed"] == "true" for r in rows)


def test_unwritable_output_exits_3(capsys):
    argv = ["variance", "--mu", "1", "--rho", "1", "--tau-max", "1",
            "--output", "/no/such/dir/out.json"]
    assert run(argv) == 3


def test_emit_validation():
    with pytest.raises(ValueError, match="records"):
        emit([], "json")
    with pytest.raises(FloatingPointError, match="total"):
        emit([{"total": math.inf}], "json")
    with pytest.raises(ValueError, match="fields"):
        emit([{"a": 1.0}, {"b": 2.0}], "csv")


def test_emit_json_shape(capsys):
    emit([{"x": 1.0, "ok": True, "name": "row", "none": None}], "json")
    data = json.loads(capsys.readouterr().out)
    assert data == [{"x": 1.0, "ok": True, "name": "row", "none": None}]


def test_emit_csv_header_and_round_trip(capsys):
    vals = {"x": 0.1 + 0.2, "y": 1.0 / 3.0, "n": 7}
    emit([vals], "csv")
    out = capsys.readouterr().out
    lines = out.strip().split("\n")
    assert lines[0] == "x,y,n"
    parsed = _csv_records(out)[0]
    assert float(parsed["x"]) == vals["x"]
    assert float(parsed["y"]) == vals["y"]
    assert int(parsed["n"]) == 7


def test_version_flag():
    assert run(["--version"]) == 0
