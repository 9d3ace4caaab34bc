"""The action of ``GL_l x GL_m x GL_n`` on ``l x m x n`` tensors.

``(L, M, N) . A`` has entries ``sum_{ijk} L[p,i] M[q,j] N[r,k] A[i,j,k]``,
computed here as three mode products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import DimensionError, NonInvertibleFactor, Singular
from .validation import check_square_matrix, check_tensor


@dataclass(frozen=True)
class GLTriple:
    """Three invertible square matrices; invertibility is checked on construction."""

    L: np.ndarray
    M: np.ndarray
    N: np.ndarray
    sing_tol: float = linalg.DEFAULT_SING_TOL

    def __post_init__(self):
        for name in ("L", "M", "N"):
            factor = check_square_matrix(getattr(self, name), name)
            if not linalg.is_invertible(factor, self.sing_tol):
                raise NonInvertibleFactor(f"factor {name} is singular at sing_tol={self.sing_tol:g}")
            object.__setattr__(self, name, factor)

    @classmethod
    def identity(cls, l: int, m: int, n: int) -> "GLTriple":
        return cls(linalg.identity(l), linalg.identity(m), linalg.identity(n))

    @classmethod
    def random(cls, l: int, m: int, n: int, rng=None) -> "GLTriple":
        """Complex Gaussian factors (invertible with probability one)."""
        rng = np.random.default_rng(rng)

        def draw(d):
            return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))

        return cls(draw(l), draw(m), draw(n))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.L.shape[0], self.M.shape[0], self.N.shape[0]

    def __iter__(self):
        return iter((self.L, self.M, self.N))


def mode_product(A: np.ndarray, U: np.ndarray, mode: int) -> np.ndarray:
    """Multiply every mode-``mode`` fiber of ``A`` by ``U``."""
    if U.shape[1] != A.shape[mode]:
        raise DimensionError(f"mode-{mode} size {A.shape[mode]} does not match factor {U.shape}")
    moved = np.moveaxis(A, mode, 0)
    out = np.tensordot(U, moved, axes=(1, 0))
    return np.moveaxis(out, 0, mode)


def act(g: GLTriple, A) -> np.ndarray:
    A = check_tensor(A)
    if g.dims != A.shape:
        raise DimensionError(f"group element of dims {g.dims} cannot act on tensor of shape {A.shape}")
    B = mode_product(A, g.L, 0)
    B = mode_product(B, g.M, 1)
    return mode_product(B, g.N, 2)


def _check_pair(g: GLTriple, h: GLTriple):
    if g.dims != h.dims:
        raise DimensionError(f"group elements have different dims {g.dims} and {h.dims}")


def compose(g: GLTriple, h: GLTriple) -> GLTriple:
    """The product ``g h``; acting with it equals acting with ``h`` then ``g``."""
    _check_pair(g, h)
    return GLTriple(g.L @ h.L, g.M @ h.M, g.N @ h.N, min(g.sing_tol, h.sing_tol))


def inverse(g: GLTriple) -> GLTriple:
    try:
        return GLTriple(*(linalg.inverse(F, g.sing_tol) for F in g), sing_tol=g.sing_tol)
    except Singular as exc:
        raise NonInvertibleFactor(str(exc)) from exc


def action_deviation(g: GLTriple, g2: GLTriple, A, A2) -> float:
    """Max entrywise distance between ``g . A`` and ``g2 . A2``."""
    return float(np.max(np.abs(act(g, A) - act(g2, A2))))


def continuity_bound(g: GLTriple, g2: GLTriple, A, A2, check: bool = True) -> float:
    """Bound on ``max |(g . A) - (g2 . A2)|`` from the four-term telescoping estimate.

    Every entry of the difference is a sum of ``l m n`` products, each split
    into four terms; each term is at most ``delta`` (the largest entrywise
    deviation among the four arguments) times three sup-norms.  Hence the
    bound ``4 l m n * delta * max(M_a M_b M_c)`` over triples of the sup-norms
    ``M_1..M_4`` of ``L, M, N, A`` taken over both arguments.

    With ``check`` the bound is compared with the actual deviation and an
    :class:`ArithmeticError` is raised if it fails to dominate.
    """
    _check_pair(g, g2)
    A, A2 = check_tensor(A, "A"), check_tensor(A2, "A2")
    if A.shape != A2.shape or A.shape != g.dims:
        raise DimensionError(f"shapes {A.shape}, {A2.shape} incompatible with group dims {g.dims}")
    l, m, n = A.shape
    pairs = [(g.L, g2.L), (g.M, g2.M), (g.N, g2.N), (A, A2)]
    sups = [max(np.abs(x).max(), np.abs(y).max()) for x, y in pairs]
    delta = max(np.abs(x - y).max() for x, y in pairs)
    triples = [sups[1] * sups[2] * sups[3], sups[0] * sups[2] * sups[3],
               sups[0] * sups[1] * sups[3], sups[0] * sups[1] * sups[2]]
    bound = float(4 * l * m * n * delta * max(triples))
    if check:
        actual = action_deviation(g, g2, A, A2)
        # allow for rounding in the two evaluations
        slack = 8 * l * m * n * np.finfo(float).eps * sups[0] * sups[1] * sups[2] * sups[3]
        if actual > bound + slack:
            raise ArithmeticError(f"deviation {actual:.3e} exceeds bound {bound:.3e}")
    return bound
