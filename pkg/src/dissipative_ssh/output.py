"""Deterministic CSV/JSON table writer.

Floats are written in shortest round-trip form (``repr``), complex values are
split into ``re_``/``im_`` columns by the caller, and every file starts with
``#`` header lines holding the resolved configuration.
"""

from __future__ import annotations

import json
import math
from typing import Any, Iterable, Sequence


def format_value(x: Any) -> str:
    if hasattr(x, "dtype"):  # numpy scalar
        return format_value(x.item())
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return repr(float(x))
    if x is None:
        return ""
    return str(x)


def _json_value(x: Any) -> Any:
    if hasattr(x, "dtype"):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def render(header: dict, columns: Sequence[str], rows: Iterable[Sequence[Any]],
           fmt: str = "csv", notes: Sequence[str] = ()) -> str:
    rows = list(rows)
    if fmt == "csv":
        lines = [f"# {k}: {format_value(v)}" for k, v in header.items()]
        lines += [f"# {n}" for n in notes]
        lines.append(",".join(columns))
        lines += [",".join(format_value(v) for v in r) for r in rows]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        doc = {
            "header": {k: _json_value(v) for k, v in header.items()},
            "notes": list(notes),
            "columns": list(columns),
            "rows": [[_json_value(v) for v in r] for r in rows],
        }
        return json.dumps(doc, indent=1, allow_nan=False) + "\n"
    raise ValueError(f"unknown output format {fmt!r}")
