"""Rank certification of ``m x m x n`` tensors by simultaneous diagonalization.

With an invertible first slice ``A_1``, the tensor has rank exactly ``m``
iff the ratios ``A_r A_1^-1`` (``r >= 2``) share an eigenbasis.  A common
basis ``P`` with ``P^-1 (A_r A_1^-1) P = diag(d^(r))`` gives the ``m``-term
decomposition

    x_i = P[:, i],  y_i = (P^-1 A_1)[i, :],  z_i = (1, d_i^(2), ..., d_i^(n)).

A singular first slice is handled by mixing slices with an invertible
third-mode matrix first; the action of ``(E, E, N)`` does not change rank.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .exceptions import AllSliceCombinationsSingular, DimensionError, Inconclusive, Singular
from .group_action import GLTriple, act
from .tensor import CPDecomposition, norm_l1
from .validation import check_tensor

DEFAULT_CERT_TOL = 1e-8


class Verdict(str, enum.Enum):
    RANK_EQUALS_M = "RankEqualsM"
    RANK_EXCEEDS_M = "RankNotEqualM_Exceeds"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class RankCertificate:
    """Numerical verdict on ``rank(A) == m`` with the evidence behind it.

    For ``RankEqualsM`` the ``decomposition`` has exactly ``m`` terms and
    reproduces the input to ``cert_tol`` relative l1 error (checked before
    the certificate is issued).
    """

    verdict: Verdict
    m: int
    tolerances: dict
    seed: int | None
    mixing: np.ndarray
    basis: np.ndarray | None = None
    decomposition: CPDecomposition | None = None
    reconstruction_error: float | None = None
    obstruction: tuple | None = None
    justification: str = ""
    norm: str = "l1"
    numerical: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def rank_equals_m(self) -> bool:
        return self.verdict is Verdict.RANK_EQUALS_M

    def to_doc(self) -> dict:
        doc = {
            "verdict": self.verdict.value,
            "m": self.m,
            "numerical": self.numerical,
            "norm": self.norm,
            "seed": self.seed,
            "tolerances": dict(self.tolerances),
            "preprocessing": {"mixing": self.mixing},
            "justification": self.justification,
        }
        evidence: dict = {}
        if self.basis is not None:
            evidence["basis"] = self.basis
        if self.decomposition is not None:
            d = self.decomposition
            evidence["cp"] = {"rank": d.rank, "X": d.X, "Y": d.Y, "Z": d.Z}
            evidence["reconstruction_error"] = self.reconstruction_error
        if self.obstruction is not None:
            evidence["obstruction"] = _obstruction_doc(self.obstruction)
        doc["evidence"] = evidence
        doc.update(self.extra)
        return doc


def _obstruction_doc(ob: tuple) -> dict:
    kind = ob[0]
    if kind == "commutator":
        _, i, j, value = ob
        # slice ratios are numbered from the second slice
        return {"kind": kind, "ratios": [i + 2, j + 2], "commutator_l1": value}
    if kind == "defective":
        _, i, witness = ob
        doc = {"kind": kind, "ratio": i + 2}
        if witness is not None:
            lam, alg, geo = witness
            doc.update(eigenvalue=complex(lam), algebraic=alg, geometric=geo)
        return doc
    return {"kind": str(kind)}


def max_rank_value(n: int) -> int:
    """Largest rank attained on ``C^{n x n x 2}``: ``n + floor(n / 2)``."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    return n + n // 2


def mix_first_slice(
    A,
    seed=0,
    max_tries: int = 32,
    sing_tol: float = linalg.DEFAULT_SING_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """Return ``((E, E, N) . A, N)`` with an invertible first slice.

    ``N`` is the identity when ``A_1`` is already invertible, otherwise a
    random complex Gaussian matrix.
    """
    A = check_tensor(A, square=True)
    n = A.shape[2]
    if linalg.is_invertible(A[:, :, 0], sing_tol):
        return A.copy(), linalg.identity(n)
    rng = np.random.default_rng(seed)
    m = A.shape[0]
    for _ in range(max_tries):
        N = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        if not linalg.is_invertible(N, sing_tol):
            continue
        first = np.tensordot(A, N[0], axes=(2, 0))
        if linalg.is_invertible(first, sing_tol):
            mixed = act(GLTriple(linalg.identity(m), linalg.identity(m), N), A)
            return mixed, N
    raise AllSliceCombinationsSingular(
        f"no invertible slice combination found in {max_tries} random draws"
    )


def bi_rank_check(
    A,
    gap_tol: float | None = None,
    rank_tol: float | None = None,
    sim_tol: float = linalg.DEFAULT_SIM_TOL,
    comm_tol: float = linalg.DEFAULT_COMM_TOL,
    cert_tol: float = DEFAULT_CERT_TOL,
    sing_tol: float = linalg.DEFAULT_SING_TOL,
    seed: int | None = 0,
    max_tries: int = 16,
    max_mix_tries: int = 32,
) -> RankCertificate:
    """Certify whether an ``m x m x n`` tensor (``n >= 2``) has rank exactly ``m``.

    ``gap_tol`` and ``rank_tol`` are relative to the l1 norm of the matrix
    being examined; ``None`` selects ``1e-8``.

    Raises :class:`AllSliceCombinationsSingular` when no invertible slice
    combination can be found.
    """
    A = check_tensor(A, square=True)
    m, _, n = A.shape
    if n < 2:
        raise DimensionError(f"need at least 2 slices, got {n}")
    tolerances = {
        "gap_tol": linalg.DEFAULT_GAP_TOL if gap_tol is None else gap_tol,
        "rank_tol": linalg.DEFAULT_RANK_TOL if rank_tol is None else rank_tol,
        "sim_tol": sim_tol,
        "comm_tol": comm_tol,
        "cert_tol": cert_tol,
        "sing_tol": sing_tol,
        "max_tries": max_tries,
        "tolerance_scaling": "gap_tol, rank_tol relative to l1 norm of each slice ratio",
    }
    mix_seed, diag_seed = np.random.SeedSequence(seed).spawn(2)
    mixed, N = mix_first_slice(A, mix_seed, max_mix_tries, sing_tol)

    def certificate(verdict, **kw):
        return RankCertificate(verdict, m, tolerances, seed, N, **kw)

    A1 = mixed[:, :, 0]
    A1inv = linalg.inverse(A1, sing_tol)
    ratios = [mixed[:, :, r] @ A1inv for r in range(1, n)]
    try:
        result = linalg.simultaneously_diagonalizable(
            ratios, gap_tol, rank_tol, diag_seed, sim_tol, comm_tol, max_tries
        )
    except Inconclusive as exc:
        return certificate(Verdict.INCONCLUSIVE, justification=str(exc))

    if not result.simultaneous:
        return certificate(
            Verdict.RANK_EXCEEDS_M,
            obstruction=result.obstruction,
            justification=(
                "slice ratios are not simultaneously diagonalizable, so rank != m; "
                "the invertible first slice forces rank >= m, hence rank > m"
            ),
        )

    P = result.basis
    try:
        Pinv = linalg.inverse(P, sing_tol)
    except Singular as exc:
        return certificate(Verdict.INCONCLUSIVE, justification=f"common basis is singular: {exc}")
    Y = (Pinv @ A1).T
    Z_mixed = np.vstack([np.ones(m, dtype=complex), result.diagonals])
    Z = linalg.inverse(N, sing_tol) @ Z_mixed
    cp = CPDecomposition(P.copy(), Y, Z)
    scale = norm_l1(A)
    error = norm_l1(cp.to_tensor() - A) / scale
    if not error <= cert_tol:
        return certificate(
            Verdict.INCONCLUSIVE,
            basis=P,
            reconstruction_error=error,
            justification=f"common basis found but the {m}-term decomposition misses the input "
            f"by {error:.3e} (relative l1) > cert_tol",
        )
    return certificate(
        Verdict.RANK_EQUALS_M,
        basis=P,
        decomposition=cp,
        reconstruction_error=error,
        justification=(
            f"slice ratios share an eigenbasis; the {m}-term decomposition reproduces the input, "
            "and the invertible first slice forces rank >= m"
        ),
    )
