"""Input validation helpers in the spirit of ``sklearn.utils.check_array``."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import DimensionError


def _as_complex(X, name: str, ndim: int) -> np.ndarray:
    arr = np.asarray(X)
    if arr.dtype == object:
        raise TypeError(f"{name} must be numeric, got object array")
    arr = arr.astype(complex, copy=False)
    if arr.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-D, got shape {arr.shape}")
    if any(d == 0 for d in arr.shape):
        raise DimensionError(f"{name} has an empty dimension: {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def check_matrix(A, name: str = "A") -> np.ndarray:
    return _as_complex(A, name, 2)


def check_square_matrix(A, name: str = "A") -> np.ndarray:
    A = _as_complex(A, name, 2)
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {A.shape}")
    return A


def check_vector(x, name: str = "x") -> np.ndarray:
    return _as_complex(x, name, 1)


def check_tensor(A, name: str = "A", square: bool = False, n_slices: int | None = None) -> np.ndarray:
    """Validate an ``l x m x n`` complex tensor (index order ``[i, j, k]``).

    ``square`` requires ``l == m``; ``n_slices`` pins the third dimension.
    """
    A = _as_complex(A, name, 3)
    if square and A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must have square slices, got shape {A.shape}")
    if n_slices is not None and A.shape[2] != n_slices:
        raise DimensionError(f"{name} must have {n_slices} slices, got {A.shape[2]}")
    return A


def check_positive(value, name: str) -> float:
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)
