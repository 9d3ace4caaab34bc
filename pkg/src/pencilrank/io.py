"""Canonical JSON documents for tensors, matrices and reports.

Tensor document::

    {"dims": [l, m, n],
     "slices": [  # n slices
        [  # l rows
          [[re, im], ...],  # m entries
          ...],
        ...]}

Matrix document::

    {"shape": [rows, cols], "entries": [[[re, im], ...], ...]}

Entries are two-element arrays of JSON numbers.  ``NaN``/``Infinity`` are
rejected.  Floats are written with ``repr`` so a parse/serialize round trip
is exact, including ``-0.0``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .exceptions import FormatError
from .validation import check_matrix, check_tensor


def _reject_constant(name):
    raise FormatError(f"non-finite value {name!r} is not allowed")


def _loads(text: str, source: str):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}: invalid JSON: {exc}") from exc
    except FormatError as exc:
        raise FormatError(f"{source}: {exc}") from exc


def _entry(value, where: str) -> complex:
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise FormatError(f"{where}: entry must be [re, im], got {value!r}")
    re, im = float(value[0]), float(value[1])
    if not (math.isfinite(re) and math.isfinite(im)):
        raise FormatError(f"{where}: non-finite entry {value!r}")
    return complex(re, im)


def _rows(rows, n_rows: int, n_cols: int, where: str) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != n_rows:
        raise FormatError(f"{where}: expected {n_rows} rows")
    out = np.empty((n_rows, n_cols), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n_cols:
            raise FormatError(f"{where}, row {i}: expected {n_cols} entries")
        for j, value in enumerate(row):
            out[i, j] = _entry(value, f"{where}[{i}][{j}]")
    return out


def _dims(doc, key: str, count: int, source: str) -> list[int]:
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(f"{source}: missing field {key!r}")
    dims = doc[key]
    if (
        not isinstance(dims, list)
        or len(dims) != count
        or not all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in dims)
    ):
        raise FormatError(f"{source}: field {key!r} must be {count} positive integers, got {dims!r}")
    return dims


def tensor_from_doc(doc, source: str = "<tensor>") -> np.ndarray:
    l, m, n = _dims(doc, "dims", 3, source)
    raw = doc.get("slices")
    if not isinstance(raw, list) or len(raw) != n:
        raise FormatError(f"{source}: field 'slices' must hold {n} slices")
    mats = [_rows(s, l, m, f"{source}: slices[{k}]") for k, s in enumerate(raw)]
    return np.stack(mats, axis=2)


def matrix_from_doc(doc, source: str = "<matrix>") -> np.ndarray:
    rows, cols = _dims(doc, "shape", 2, source)
    if "entries" not in doc:
        raise FormatError(f"{source}: missing field 'entries'")
    return _rows(doc["entries"], rows, cols, f"{source}: entries")


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def encode_matrix_rows(A) -> list:
    A = np.asarray(A, dtype=complex)
    return [[_pair(z) for z in row] for row in A]


def tensor_to_doc(A) -> dict:
    A = check_tensor(A)
    return {
        "dims": list(A.shape),
        "slices": [encode_matrix_rows(A[:, :, k]) for k in range(A.shape[2])],
    }


def matrix_to_doc(A) -> dict:
    A = check_matrix(A)
    return {"shape": list(A.shape), "entries": encode_matrix_rows(A)}


def dumps(doc) -> str:
    """Deterministic serialization: sorted keys, fixed separators, trailing newline."""
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=1, allow_nan=False) + "\n"


def to_jsonable(obj):
    """Convert numpy arrays and complex numbers to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            if obj.ndim == 0:
                return _pair(complex(obj))
            if obj.ndim == 1:
                return [_pair(z) for z in obj]
            if obj.ndim == 2:
                return encode_matrix_rows(obj)
            return [to_jsonable(x) for x in obj]
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return _pair(complex(obj))
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps_tensor(A) -> str:
    return dumps(tensor_to_doc(A))


def loads_tensor(text: str, source: str = "<tensor>") -> np.ndarray:
    return tensor_from_doc(_loads(text, source), source)


def loads_matrix(text: str, source: str = "<matrix>") -> np.ndarray:
    return matrix_from_doc(_loads(text, source), source)


def read_tensor(path) -> np.ndarray:
    path = Path(path)
    return loads_tensor(path.read_text(), str(path))


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    return loads_matrix(path.read_text(), str(path))


def write_tensor(A, path) -> None:
    Path(path).write_text(dumps_tensor(A))
