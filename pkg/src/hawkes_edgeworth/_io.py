"""Text serialization helpers: CSV and JSON with 17 significant digits."""

import json
import math
from pathlib import Path

import numpy as np

from .errors import FormatError


def fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _dump(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj):
            return "[" + ", ".join(_dump(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _dump(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            raise ValueError("non-finite float is not valid JSON")
        return fmt(obj)
    return json.dumps(str(obj))


def dumps_json(obj, indent=2):
    """JSON text with every float at 17 significant digits."""
    return _dump(obj, indent, 0) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps_json(obj), newline="\n")


def read_json(path):
    path = Path(path)
    text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, path, exc.lineno, exc.colno) from None


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(v) if isinstance(v, (int, np.integer)) else fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def read_csv(path, header):
    """Read a numeric CSV with the exact ``header``; returns a 2-D float array."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise FormatError("empty file, expected header " + ",".join(header), path, 1, 1)
    got = [h.strip() for h in lines[0].split(",")]
    if got != list(header):
        raise FormatError(f"expected header {','.join(header)!r}, got {lines[0]!r}", path, 1, 1)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise FormatError(f"expected {len(header)} fields, got {len(cells)}", path, lineno, 1)
        row = []
        col = 1
        for cell in cells:
            try:
                row.append(float(cell))
            except ValueError:
                raise FormatError(f"not a number: {cell.strip()!r}", path, lineno, col) from None
            col += len(cell) + 1
        rows.append(row)
    return np.asarray(rows, dtype=np.float64).reshape(len(rows), len(header))
