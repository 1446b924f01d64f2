"""CSV and JSON emission with exact integers and 17-significant-digit reals.

Both formats carry the same header block: ``# key=value`` comment lines in
CSV, a ``meta`` object in JSON.  Output is produced as a single string so
callers can write it atomically and compare runs byte for byte.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np


@dataclass
class Table:
    columns: list[str]
    rows: list[Sequence[Any]] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)


def format_real(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return "%.17g" % (v + 0.0)  # folds -0.0 into 0


def format_value(v: Any) -> str:
    """Text form of one cell: ints exactly, floats to 17 significant digits."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_real(float(v))
    return str(v)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    for key, value in table.meta.items():
        text = format_value(value).replace("\n", " ")
        buf.write(f"# {key}={text}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _json_value(v: Any) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        # JSON has no non-finite numbers
        return format_real(v) if math.isfinite(v) else json.dumps(format_real(v))
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    return json.dumps(str(v))


def to_json(table: Table) -> str:
    lines = ["{", f'  "meta": {_json_value(table.meta)},', f'  "columns": {_json_value(table.columns)},', '  "rows": [']
    body = [f"    {_json_value(list(r))}" for r in table.rows]
    lines.append(",\n".join(body))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(line for line in lines if line) + "\n"


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    raise ValueError(f"unknown format {fmt!r}")


def parse_csv(text: str) -> Table:
    """Inverse of :func:`to_csv` (values come back as strings)."""
    meta: dict[str, str] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            meta[key] = value
        else:
            body.append(line)
    reader = csv.reader(body)
    rows = list(reader)
    if not rows:
        return Table([], [], meta)
    return Table(rows[0], rows[1:], meta)
