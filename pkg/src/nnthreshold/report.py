"""Rendering of CLI payloads as text, JSON or CSV.

A payload is a dict with a ``schema`` name, optional scalar metadata and an
optional ``rows`` list of flat dicts. Floats are always printed in scientific
notation with 6 significant digits so identical runs give identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from enum import Enum
from typing import Any


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"
    CSV = "csv"


def fmt_float(v: float) -> str:
    if math.isnan(v) or math.isinf(v):
        return str(v)
    return f"{v:.5e}"


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    if v is None:
        return ""
    if isinstance(v, Enum):
        return str(v.value)
    return str(v)


def to_json(payload: dict) -> str:
    floats: list[str] = []

    def walk(v):
        if isinstance(v, bool) or v is None:
            return v
        if isinstance(v, float):
            if math.isnan(v) or math.isinf(v):
                return str(v)
            floats.append(fmt_float(v))
            return f"@@float{len(floats) - 1}@@"
        if isinstance(v, Enum):
            return v.value
        if isinstance(v, dict):
            return {str(k): walk(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [walk(x) for x in v]
        return v

    text = json.dumps(walk(payload), indent=2)
    for i, f in enumerate(floats):
        text = text.replace(f'"@@float{i}@@"', f, 1)
    return text + "\n"


def _columns(rows) -> list[str]:
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    return cols


def to_csv(payload: dict) -> str:
    rows = payload.get("rows")
    if rows is None:
        rows = [{k: v for k, v in payload.items() if k != "schema" and not isinstance(v, (list, dict))}]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = _columns(rows)
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def to_text(payload: dict) -> str:
    lines = []
    for k, v in payload.items():
        if k in ("schema", "rows") or isinstance(v, (list, dict)):
            continue
        lines.append(f"{k}: {_cell(v)}")
    rows = payload.get("rows")
    if rows:
        if lines:
            lines.append("")
        cols = _columns(rows)
        cells = [[_cell(r.get(c)) for c in cols] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        lines.append("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip())
        for row in cells:
            lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def render(payload: dict, fmt: OutputFormat) -> str:
    fmt = OutputFormat(fmt)
    if fmt is OutputFormat.JSON:
        return to_json(payload)
    if fmt is OutputFormat.CSV:
        return to_csv(payload)
    return to_text(payload)
