from __future__ import annotations

import csv
import io
import json

import jsonschema
import numpy as np
import pytest

from heisgb.report import Report, format_value, load_schema, render, to_csv, to_table


def sample() -> Report:
    return Report(
        "curve",
        {"kind": "svk1", "t": "0:1:2"},
        ["t", "branch", "value"],
        [{"t": np.float64(0.0), "branch": "NonHorizontal", "value": 1 / 3},
         {"t": 1.0, "branch": 'quoted, "name"', "value": float("nan")}],
        {"note": "x", "n": np.int64(2)},
        ["careful"],
    )


def test_json_round_trip_and_schema():
    rep = sample()
    data = json.loads(rep.to_json())
    jsonschema.validate(data, load_schema())
    assert data["rows"][1]["value"] is None
    back = Report.from_json(rep.to_json())
    assert back.to_dict() == rep.to_dict()


def test_schema_version_checked():
    data = sample().to_dict()
    data["schema_version"] = "0.1"
    with pytest.raises(ValueError):
        Report.from_dict(data)


def test_error_report_validates():
    rep = Report("surface", {}, status="error",
                 error={"type": "CharacteristicPointError", "message": "m", "exit_code": 2, "details": {}})
    jsonschema.validate(json.loads(rep.to_json()), load_schema())


def test_table_cells_equal_json_values():
    rep = sample()
    text = to_table(rep)
    assert repr(1 / 3) in text
    assert "careful" in text


def test_csv_quoting_and_line_ends():
    out = to_csv(sample())
    assert out.endswith("\r\n")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["t", "branch", "value"]
    assert rows[2][1] == 'quoted, "name"'
    assert float(rows[1][2]) == 1 / 3


def test_format_value():
    assert format_value(True) == "true"
    assert format_value(None) == ""
    assert format_value(0.1) == "0.1"
    assert format_value([1, 2]) == "[1, 2]"


def test_render_rejects_unknown_format():
    with pytest.raises(ValueError):
        render(sample(), "xml")
