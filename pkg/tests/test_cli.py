from __future__ import annotations

import csv
import io
import json
import math
import subprocess
import sys
import time

import jsonschema
import pytest

from heisgb.cli import EXIT_FAILURE, EXIT_INPUT, EXIT_OK, main, parse_t_grid
from heisgb.report import format_value, load_schema

SCHEMA = load_schema()


def run_json(capsys, *argv):
    code = main([*argv, "--format", "json"])
    data = json.loads(capsys.readouterr().out)
    jsonschema.validate(data, SCHEMA)
    return code, data


def test_curve_limit_on_circle(capsys):
    code, data = run_json(capsys, "curve", "--kind", "svk1", "--gamma", "cos(t),sin(t),0", "--limit",
                          "--t", "0:6.283:64")
    assert code == EXIT_OK
    assert len(data["rows"]) == 64
    assert {r["branch"] for r in data["rows"]} == {"NonHorizontal"}
    assert all(abs(r["value"] - 1.0) < 1e-14 for r in data["rows"])


def test_curve_adapted_line(capsys):
    code, data = run_json(capsys, "curve", "--kind", "adapted", "--gamma", "t,0,0", "--L", "100", "--t", "0")
    assert code == EXIT_OK and data["rows"][0]["value"] == 0.0


def test_curve_svk2_divergent_row(capsys):
    code, data = run_json(capsys, "curve", "--kind", "svk2", "--gamma", "t,0,t^2/2", "--limit", "--t", "0")
    row = data["rows"][0]
    assert row["branch"] == "HorizontalDivergent"
    assert row["discriminator"] == 1.0 and row["value"] == 1.0


def test_curve_geodesic_on_scene_boundary(capsys):
    code, data = run_json(capsys, "curve", "--kind", "svk2", "--scene", "plane-disk", "--geodesic", "--limit",
                          "--t", "0.5,1.5")
    assert code == EXIT_OK
    assert data["rows"][1]["signed"] == pytest.approx(math.sin(1.5) ** 2, abs=1e-14)


def test_surface_plane_limit(capsys):
    code, data = run_json(capsys, "surface", "--scene", "plane-disk", "--kind", "svk1", "--limit",
                          "--point", "1,0,0")
    assert code == EXIT_OK and data["rows"][0]["K_limit"] == pytest.approx(-1.0, rel=1e-14)


def test_surface_adapted_grid_is_zero(capsys):
    code, data = run_json(capsys, "surface", "--scene", "paraboloid-cap", "--kind", "adapted", "--limit",
                          "--grid", "4")
    assert code == EXIT_OK and all(r["K_limit"] == 0.0 for r in data["rows"])


def test_surface_finite_L_columns(capsys):
    code, data = run_json(capsys, "surface", "--u", "x3", "--kind", "levi-civita", "--L", "2",
                          "--point", "1,0,0")
    assert set(data["columns"]) >= {"II11", "II22", "H", "K_amb", "K_surf"}


def test_characteristic_point_is_structured_error(capsys):
    code, data = run_json(capsys, "surface", "--scene", "plane-disk", "--kind", "svk1", "--limit",
                          "--point", "0,0,0")
    assert code == EXIT_INPUT != EXIT_OK
    assert data["status"] == "error"
    assert data["error"]["type"] == "CharacteristicPointError"
    assert data["error"]["details"]["point"] == [0.0, 0.0, 0.0]


@pytest.mark.parametrize(
    "argv",
    [
        ["curve", "--kind", "svk1", "--gamma", "cos(t),sin(t)", "--L", "1", "--t", "0"],
        ["curve", "--kind", "svk1", "--gamma", "cos(t),sin(t),0", "--t", "0"],
        ["curve", "--kind", "svk1", "--gamma", "cos(t),sin(t),0", "--limit", "--L", "2", "--t", "0"],
        ["curve", "--kind", "levi-civita", "--gamma", "cos(t),sin(t),0", "--limit", "--t", "0"],
        ["curve", "--kind", "svk1", "--gamma", "log(t),0,0", "--L", "1", "--t", "0"],
        ["gauss-bonnet", "--kind", "svk1", "--scene", "no-such-scene.toml"],
        ["surface", "--kind", "svk1", "--u", "x3", "--limit", "--point", "1,0,1"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, data = run_json(capsys, *argv)
    assert code == EXIT_INPUT and data["status"] == "error"


def test_gauss_bonnet_plane_disk(capsys):
    for kind in ("svk1", "svk2"):
        code, data = run_json(capsys, "gauss-bonnet", "--kind", kind, "--scene", "plane-disk", "--mode", "limit",
                              "--check", "1e-6")
        assert code == EXIT_OK
        assert abs(data["rows"][0]["residual"]) <= 1e-6
        assert len(data["summary"]["extrapolation"]) == 3


def test_gauss_bonnet_paraboloid_finite_L(capsys):
    code, data = run_json(capsys, "gauss-bonnet", "--kind", "levi-civita", "--scene", "paraboloid-cap",
                          "--mode", "finite-L", "--L", "1")
    assert code == EXIT_OK and abs(data["rows"][0]["residual"]) <= 1e-6


def test_gauss_bonnet_check_failure_exits_4(capsys):
    # roundoff alone exceeds a threshold of 1e-300
    code, data = run_json(capsys, "gauss-bonnet", "--kind", "levi-civita", "--scene", "paraboloid-cap",
                          "--mode", "finite-L", "--L", "4", "--check", "1e-300")
    assert data["rows"][0]["residual"] != 0.0
    assert code == EXIT_FAILURE and data["status"] == "fail" and data["warnings"]


def test_verify_command(capsys):
    code, data = run_json(capsys, "verify", "--seed", "42", "--samples", "5")
    assert code == EXIT_OK and data["summary"]["failed"] == []
    assert all(r["passed"] for r in data["rows"])


def test_limit_scan_exponent(capsys):
    code, data = run_json(capsys, "limit-scan", "--quantity", "gauss-curvature", "--kind", "svk1",
                          "--scene", "paraboloid-cap", "--point", "0.5,0.3,0.17", "--L-min", "1e4", "--L-max", "1e8",
                          "--count", "9")
    assert code == EXIT_OK
    assert len(data["rows"]) == 9
    assert 0.4 <= data["summary"]["exponent"] <= 1.1


def test_table_and_csv_agree_with_json(capsys):
    argv = ["curve", "--kind", "svk2", "--gamma", "cos(t),sin(t),t/5", "--L", "3", "--t", "0:1:5"]
    main([*argv, "--format", "json"])
    data = json.loads(capsys.readouterr().out)
    main([*argv, "--format", "csv"])
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == data["columns"]
    for got, row in zip(rows[1:], data["rows"]):
        assert got == [format_value(row.get(c)) for c in data["columns"]]
    main([*argv, "--format", "table"])
    table = capsys.readouterr().out
    for row in data["rows"]:
        line = next(l for l in table.splitlines() if l.split() and l.split()[0] == format_value(row["t"]))
        assert line.split() == [format_value(row[c]) for c in data["columns"] if format_value(row[c])]


def test_output_is_deterministic(capsys):
    argv = ["gauss-bonnet", "--kind", "svk2", "--scene", "paraboloid-cap"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_t_grid_forms():
    assert list(parse_t_grid("0:1:3")) == [0.0, 0.5, 1.0]
    assert list(parse_t_grid("0, pi/2")) == [0.0, 1.5707963267948966]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "heisgb", "curve", "--kind", "adapted", "--gamma", "t,0,0",
                          "--L", "1", "--t", "0", "--format", "csv"], capture_output=True, text=True, check=True)
    assert out.stdout.splitlines()[0].startswith("t,omega")


def test_verify_thousand_samples_within_budget(capsys):
    start = time.perf_counter()
    code, data = run_json(capsys, "verify", "--seed", "7", "--samples", "1000")
    elapsed = time.perf_counter() - start
    assert code == EXIT_OK, data["summary"]["failed"]
    assert elapsed < 60.0
