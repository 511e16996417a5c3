"""Reports: JSON document, aligned text table and CSV.

Every report has the same envelope; command-specific data lives in ``rows``
(one record per evaluated input, in input order) and ``summary``.  Error
estimates sit next to the value they qualify under the key ``<name>_error``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources

SCHEMA_VERSION = "1.0"


def _clean(value):
    """JSON-safe copy: numpy scalars become Python numbers, non-finite floats null."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


@dataclass
class Report:
    command: str
    parameters: dict = field(default_factory=dict)
    columns: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    status: str = "ok"
    error: dict | None = None

    def to_dict(self) -> dict:
        return _clean({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "status": self.status,
            "parameters": self.parameters,
            "columns": list(self.columns),
            "rows": self.rows,
            "summary": self.summary,
            "warnings": list(self.warnings),
            "error": self.error,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False)

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema version {data.get('schema_version')!r}")
        return cls(data["command"], data["parameters"], data["columns"], data["rows"],
                   data["summary"], data["warnings"], data["status"], data["error"])

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


def load_schema() -> dict:
    return json.loads(resources.files("heisgb").joinpath("report.schema.json").read_text(encoding="utf-8"))


def format_value(value) -> str:
    """Text form used by both the table and CSV; floats keep full precision."""
    value = _clean(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value)
    return str(value)


def to_table(report: Report) -> str:
    """Aligned plain-text rendering; cells hold the same values as the JSON."""
    out = [f"# {report.command} (status: {report.status})"]
    for key, value in report.parameters.items():
        out.append(f"# {key}: {format_value(value)}")
    if report.error:
        out.append(f"error: {report.error.get('type')}: {report.error.get('message')}")
    if report.columns:
        cells = [list(report.columns)] + [[format_value(r.get(c)) for c in report.columns] for r in report.rows]
        widths = [max(len(row[i]) for row in cells) for i in range(len(report.columns))]
        for n, row in enumerate(cells):
            out.append("  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip())
            if n == 0:
                out.append("  ".join("-" * w for w in widths))
    if report.summary:
        width = max(len(k) for k in report.summary)
        for key, value in report.summary.items():
            out.append(f"{key.ljust(width)}  {format_value(value)}")
    for w in report.warnings:
        out.append(f"warning: {w}")
    return "\n".join(out) + "\n"


def to_csv(report: Report) -> str:
    """Rows as RFC 4180 CSV (CRLF line ends, minimal quoting)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    if report.columns:
        writer.writerow(report.columns)
        for r in report.rows:
            writer.writerow([format_value(r.get(c)) for c in report.columns])
    else:
        writer.writerow(["key", "value"])
        for key, value in report.summary.items():
            writer.writerow([key, format_value(value)])
    return buf.getvalue()


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return report.to_json() + "\n"
    if fmt == "table":
        return to_table(report)
    if fmt == "csv":
        return to_csv(report)
    raise ValueError(f"unknown output format {fmt!r}")
