"""Third-order tensors, rank-one terms and CP decompositions.

A tensor is a ``complex128`` array of shape ``(l, m, n)`` indexed
``A[i, j, k]``; frontal slice ``k`` is ``A[:, :, k]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError
from .linalg import norm_l1
from .validation import check_matrix, check_tensor, check_vector

__all__ = [
    "CPDecomposition",
    "add",
    "cp_to_tensor",
    "from_slices",
    "norm_fro",
    "norm_l1",
    "outer2",
    "outer3",
    "scale",
    "slices",
    "sub",
]


def outer2(x, y) -> np.ndarray:
    return np.multiply.outer(check_vector(x, "x"), check_vector(y, "y"))


def outer3(x, y, z) -> np.ndarray:
    """The elementary tensor with entries ``x_i y_j z_k``."""
    x, y, z = check_vector(x, "x"), check_vector(y, "y"), check_vector(z, "z")
    return x[:, None, None] * y[None, :, None] * z[None, None, :]


def slices(A) -> list[np.ndarray]:
    A = check_tensor(A)
    return [A[:, :, k].copy() for k in range(A.shape[2])]


def from_slices(mats) -> np.ndarray:
    mats = [check_matrix(M, f"slice {k}") for k, M in enumerate(mats)]
    if not mats:
        raise DimensionError("need at least one slice")
    shape = mats[0].shape
    for k, M in enumerate(mats):
        if M.shape != shape:
            raise DimensionError(f"slice {k} has shape {M.shape}, expected {shape}")
    return np.stack(mats, axis=2)


def _same_dims(A, B) -> tuple[np.ndarray, np.ndarray]:
    A, B = check_tensor(A, "A"), check_tensor(B, "B")
    if A.shape != B.shape:
        raise DimensionError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A, B


def add(A, B) -> np.ndarray:
    A, B = _same_dims(A, B)
    return A + B


def sub(A, B) -> np.ndarray:
    A, B = _same_dims(A, B)
    return A - B


def scale(alpha: complex, A) -> np.ndarray:
    return alpha * check_tensor(A)


def norm_fro(A) -> float:
    return float(np.linalg.norm(np.asarray(A).ravel()))


@dataclass
class CPDecomposition:
    """``sum_i x_i (x) y_i (x) z_i`` stored as factor matrices with one column per term."""

    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray

    def __post_init__(self):
        self.X = check_matrix(self.X, "X")
        self.Y = check_matrix(self.Y, "Y")
        self.Z = check_matrix(self.Z, "Z")
        r = self.X.shape[1]
        if self.Y.shape[1] != r or self.Z.shape[1] != r:
            raise DimensionError(
                f"factor column counts differ: {self.X.shape[1]}, {self.Y.shape[1]}, {self.Z.shape[1]}"
            )

    @classmethod
    def from_terms(cls, terms) -> "CPDecomposition":
        terms = list(terms)
        if not terms:
            raise ValueError("a CP decomposition needs at least one term")
        xs, ys, zs = zip(*terms)
        return cls(np.column_stack(xs), np.column_stack(ys), np.column_stack(zs))

    @property
    def rank(self) -> int:
        return self.X.shape[1]

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.X.shape[0], self.Y.shape[0], self.Z.shape[0]

    @property
    def terms(self) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
        return [(self.X[:, i], self.Y[:, i], self.Z[:, i]) for i in range(self.rank)]

    def drop_zero_terms(self) -> "CPDecomposition":
        keep = [
            i
            for i in range(self.rank)
            if np.any(self.X[:, i]) and np.any(self.Y[:, i]) and np.any(self.Z[:, i])
        ]
        if not keep:
            raise ValueError("every term has a zero factor")
        return CPDecomposition(self.X[:, keep], self.Y[:, keep], self.Z[:, keep])

    def to_tensor(self) -> np.ndarray:
        return np.einsum("ir,jr,kr->ijk", self.X, self.Y, self.Z)


def cp_to_tensor(d: CPDecomposition, dims: tuple[int, int, int] | None = None) -> np.ndarray:
    if dims is not None and tuple(dims) != d.dims:
        raise DimensionError(f"decomposition has dims {d.dims}, expected {tuple(dims)}")
    return d.to_tensor()
