"""Byte-stable JSON, CSV and plain-text renderings of results.

Floats are written with 17 significant digits (``%.17g``), which
round-trips every double; non-finite values become the strings
``"inf"``, ``"-inf"`` and ``"nan"`` so the JSON stays standard.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Mapping, Sequence

__all__ = ["format_float", "dumps", "write_csv", "human", "SWEEP_HEADER"]

SWEEP_HEADER = ("r0", "area", "H", "F", "F_prime", "lhs", "rhs", "gap", "class")


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        text = format_float(obj)
        return text if math.isfinite(obj) else json.dumps(text)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "__float__"):
        return _encode(float(obj), indent, level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with ``%.17g`` floats and insertion-ordered keys."""
    return _encode(obj, indent, 0) + "\n"


def _cell(v: Any) -> str:
    if isinstance(v, float):
        return format_float(v)
    if v is None:
        return ""
    return str(v)


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]],
              footer: Iterable[str] = ()) -> str:
    """CSV text with ``\\n`` line endings; ``footer`` lines are prefixed with ``#``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    for line in footer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def human(obj: Mapping, level: int = 0) -> str:
    """Indented ``key: value`` text for terminals."""
    lines = []
    pad = "  " * level
    for k, v in obj.items():
        if isinstance(v, Mapping):
            lines.append(f"{pad}{k}:")
            lines.append(human(v, level + 1).rstrip("\n"))
        elif isinstance(v, float):
            lines.append(f"{pad}{k}: {v:.10g}")
        else:
            lines.append(f"{pad}{k}: {v}")
    return "\n".join(lines) + "\n"
