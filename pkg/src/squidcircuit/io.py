"""File formats: trace CSV with JSON sidecar, result bundles and long-format curve CSV.

Frequencies are written in Hz. Floats are written with 17 significant digits
so a write/read cycle is lossless and identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DataQualityError
from .trace import ComplexTrace

TRACE_HEADER = ("freq_hz", "s21_re", "s21_im")


def _fmt(x) -> str:
    return repr(float(x))


def sidecar_path(path) -> str:
    root, _ = os.path.splitext(str(path))
    return root + ".json"


def jsonable(obj):
    """Convert numpy scalars/arrays and tuples to plain JSON types; NaN becomes None."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def read_json(path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataQualityError(f"{path}: invalid JSON ({exc.msg})") from exc


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_trace(path, trace: ComplexTrace, meta: Optional[Dict[str, Any]] = None) -> None:
    """CSV ``freq_hz,s21_re,s21_im``; ``meta`` goes to a JSON sidecar next to it."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(TRACE_HEADER) + "\n")
        for f, s in zip(trace.freq_hz, trace.s21):
            fh.write(f"{_fmt(f)},{_fmt(s.real)},{_fmt(s.imag)}\n")
    if meta is not None:
        write_json(sidecar_path(path), meta)


def read_trace(path) -> Tuple[ComplexTrace, Dict[str, Any]]:
    """Trace and sidecar metadata (empty when no sidecar exists)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(c.strip() for c in rows[0]) != TRACE_HEADER:
        raise DataQualityError(f"{path}: header must be {','.join(TRACE_HEADER)}")
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise DataQualityError(f"{path}: non-numeric entry ({exc})") from exc
    if data.ndim != 2 or data.shape[1] != 3:
        raise DataQualityError(f"{path}: expected three columns")
    try:
        tr = ComplexTrace.from_hz(data[:, 0], data[:, 1] + 1j * data[:, 2])
    except DataQualityError as exc:
        raise DataQualityError(f"{path}: {exc}") from exc
    side = sidecar_path(path)
    meta = read_json(side) if os.path.exists(side) else {}
    return tr, meta


def write_curves(path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Long-format CSV; string cells are written as-is, numbers at full precision."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for r in rows:
            fh.write(",".join(c if isinstance(c, str) else _fmt(c) for c in r) + "\n")


def read_curves(path) -> Tuple[List[str], List[List[str]]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_array_csv(path, columns: Sequence[str], arrays: Sequence[Sequence[float]]) -> None:
    write_curves(path, columns, zip(*arrays))


def read_array_csv(path) -> Dict[str, np.ndarray]:
    cols, rows = read_curves(path)
    data = np.array([[float(c) for c in r] for r in rows], dtype=float).reshape(-1, len(cols))
    return {c: data[:, i] for i, c in enumerate(cols)}
