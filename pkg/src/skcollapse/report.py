"""Byte-stable JSON and CSV output for reports.

Floats are written with ``%.12e``, object keys are sorted and non-finite
values become the strings ``"nan"``, ``"inf"`` and ``"-inf"``.  Writing the
same report twice gives identical bytes.
"""

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import InputError, SkCollapseError
from .models import parse_json


def _fmt_float(x):
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return "%.12e" % x


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(obj[k], indent, level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    return _encode(obj, indent, 0) + "\n"


def csv_text(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([("%.12e" % v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _write(path, text):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise SkCollapseError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def report_stem(summary):
    return f"{summary['suite']}_{summary['model']}"


def write_report(summary, out_dir):
    """JSON summary plus one CSV file per series; returns the written paths."""
    out_dir = Path(out_dir)
    stem = report_stem(summary)
    written = [_write(out_dir / f"{stem}.json", dumps(summary))]
    for name in sorted(summary.get("series", {})):
        s = summary["series"][name]
        written.append(_write(out_dir / f"{stem}_{name}.csv", csv_text(s["columns"], s["rows"])))
    return written


def load_report(path):
    """Read a JSON summary back; floats come back as Python floats."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read report: {exc.strerror}", str(path)) from exc
    summary = parse_json(data, str(path))
    if not isinstance(summary, dict) or "suite" not in summary or "records" not in summary:
        raise InputError("not a report summary", str(path))
    return summary
