"""Dense complex linear algebra with explicit tolerances.

Everything here works on 2-D ``complex128`` arrays.  Eigenvalues come from
our own Hessenberg reduction followed by Wilkinson-shifted complex QR, so
the spectral decisions made downstream (simple spectrum, diagonalizability,
simultaneous diagonalization) are under our control.  Singular values are
taken from LAPACK through :func:`numpy.linalg.svd`.

All norms are the entrywise l1 norm ``sum |a_ij|`` unless stated otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError, Inconclusive, NoConvergence, Singular
from .validation import check_matrix, check_square_matrix

DEFAULT_GAP_TOL = 1e-8
DEFAULT_RANK_TOL = 1e-8
DEFAULT_SIM_TOL = 1e-6
DEFAULT_COMM_TOL = 1e-10
DEFAULT_SING_TOL = 1e-13
# eigenvalues closer than COND_MERGE * eps * ||A||_F * (kappa_i + kappa_j) are
# indistinguishable from a rounding split of a multiple eigenvalue
DEFAULT_COND_MERGE = 1e3

_EPS = np.finfo(float).eps


def norm_l1(A) -> float:
    """Sum of complex moduli of all entries (works for any array shape)."""
    a = np.asarray(A)
    if a.size == 0:
        return 0.0
    return math.fsum(np.hypot(a.real, a.imag).ravel().tolist())


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def mat_mul(A, B) -> np.ndarray:
    A = check_matrix(A, name="A")
    B = check_matrix(B, name="B")
    if A.shape[1] != B.shape[0]:
        raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
    return A @ B


def inverse(A, sing_tol: float = DEFAULT_SING_TOL) -> np.ndarray:
    """Gauss-Jordan inverse with row pivoting.

    Raises :class:`Singular` when a pivot magnitude drops below
    ``sing_tol * norm_l1(A)``.
    """
    A = check_square_matrix(A, name="A")
    n = A.shape[0]
    scale = norm_l1(A)
    threshold = sing_tol * scale
    work = np.hstack([A.copy(), identity(n)])
    for col in range(n):
        piv = col + int(np.argmax(np.abs(work[col:, col])))
        pivot = work[piv, col]
        if scale == 0.0 or abs(pivot) <= threshold:
            raise Singular(
                f"pivot {abs(pivot):.3e} in column {col} is below "
                f"{threshold:.3e} (sing_tol={sing_tol:g})"
            )
        if piv != col:
            work[[col, piv]] = work[[piv, col]]
        work[col] /= work[col, col]
        factors = work[:, col].copy()
        factors[col] = 0.0
        work -= np.outer(factors, work[col])
    return work[:, n:].copy()


def is_invertible(A, sing_tol: float = DEFAULT_SING_TOL) -> bool:
    try:
        inverse(A, sing_tol)
    except Singular:
        return False
    return True


def hessenberg(A) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction ``A = Q H Q*`` with ``H`` upper Hessenberg."""
    H = check_square_matrix(A, name="A").copy()
    n = H.shape[0]
    Q = identity(n)
    for k in range(n - 2):
        x = H[k + 1 :, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        H[k + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ H[k + 1 :, :])
        H[:, k + 1 :] -= 2.0 * np.outer(H[:, k + 1 :] @ v, v.conj())
        Q[:, k + 1 :] -= 2.0 * np.outer(Q[:, k + 1 :] @ v, v.conj())
        H[k + 2 :, k] = 0.0
    return Q, H


def _givens(x: complex, y: complex) -> np.ndarray:
    r = math.hypot(abs(x), abs(y))
    if r == 0.0:
        return identity(2)
    return np.array([[np.conj(x) / r, np.conj(y) / r], [-y / r, x / r]])


def _wilkinson_shift(a, b, c, d) -> complex:
    half = (a - d) / 2.0
    disc = np.sqrt(half * half + b * c)
    mu1 = (a + d) / 2.0 + disc
    mu2 = (a + d) / 2.0 - disc
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def schur(A, max_qr_iters: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Complex Schur form ``A = Q T Q*`` by shifted QR on the Hessenberg form.

    ``max_qr_iters`` bounds the total number of QR sweeps (default ``100 n``).
    """
    A = check_square_matrix(A, name="A")
    n = A.shape[0]
    if max_qr_iters is None:
        max_qr_iters = 100 * n
    Q, T = hessenberg(A)
    T = T.astype(complex)
    hi = n - 1
    sweeps = 0
    since_deflation = 0
    while hi > 0:
        lo = hi
        while lo > 0:
            sub = abs(T[lo, lo - 1])
            if sub <= _EPS * (abs(T[lo - 1, lo - 1]) + abs(T[lo, lo])) or sub < 1e-300:
                T[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            since_deflation = 0
            continue
        sweeps += 1
        since_deflation += 1
        if sweeps > max_qr_iters:
            raise NoConvergence(f"shifted QR did not converge in {max_qr_iters} sweeps")
        if since_deflation % 11 == 0:
            # exceptional shift to break cycles
            mu = T[hi, hi] + 0.75 * abs(T[hi, hi - 1]) * (1 + 1j)
        else:
            mu = _wilkinson_shift(T[hi - 1, hi - 1], T[hi - 1, hi], T[hi, hi - 1], T[hi, hi])
        x = T[lo, lo] - mu
        y = T[lo + 1, lo]
        for k in range(lo, hi):
            G = _givens(x, y)
            c0 = k - 1 if k > lo else lo
            T[k : k + 2, c0:] = G @ T[k : k + 2, c0:]
            r1 = min(k + 3, hi + 1)
            T[:r1, k : k + 2] = T[:r1, k : k + 2] @ G.conj().T
            Q[:, k : k + 2] = Q[:, k : k + 2] @ G.conj().T
            if k > lo:
                T[k + 1, k - 1] = 0.0
            if k < hi - 1:
                x = T[k + 1, k]
                y = T[k + 2, k]
    return Q, np.triu(T)


def _triangular_eigenvectors(T: np.ndarray) -> np.ndarray:
    n = T.shape[0]
    Y = np.zeros((n, n), dtype=complex)
    smin = max(_EPS * norm_l1(T), 1e-300)
    for k in range(n):
        lam = T[k, k]
        y = np.zeros(n, dtype=complex)
        y[k] = 1.0
        for i in range(k - 1, -1, -1):
            denom = T[i, i] - lam
            if abs(denom) < smin:
                denom = smin
            y[i] = -(T[i, i + 1 : k + 1] @ y[i + 1 : k + 1]) / denom
        Y[:, k] = y / np.linalg.norm(y)
    return Y


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    min_gap: float
    simple: bool
    residual: float
    gap_tol: float
    eigenvectors: np.ndarray = field(repr=False)
    # eigenvalue condition numbers ||x_i|| ||y_i|| / |y_i* x_i|
    condition: np.ndarray = field(repr=False)


def default_gap_tol(A) -> float:
    return DEFAULT_GAP_TOL * norm_l1(A)


def default_rank_tol(A) -> float:
    return DEFAULT_RANK_TOL * norm_l1(A)


def _min_gap(eigs: np.ndarray) -> float:
    if len(eigs) < 2:
        return math.inf
    d = np.abs(eigs[:, None] - eigs[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def spectrum(A, gap_tol: float | None = None, max_qr_iters: int | None = None) -> SpectrumReport:
    """Eigenvalues (the Schur diagonal), their minimum pairwise gap and eigenpair residual.

    ``gap_tol`` is absolute; ``None`` means ``1e-8 * norm_l1(A)``.
    """
    A = check_square_matrix(A, name="A")
    if gap_tol is None:
        gap_tol = default_gap_tol(A)
    Q, T = schur(A, max_qr_iters)
    eigs = np.diag(T).copy()
    V = Q @ _triangular_eigenvectors(T)
    residual = float(np.max(np.abs(A @ V - V * eigs))) if len(eigs) else 0.0
    gap = _min_gap(eigs)
    return SpectrumReport(eigs, gap, bool(gap > gap_tol), residual, gap_tol, V, _condition(V))


def _condition(V: np.ndarray) -> np.ndarray:
    try:
        W = inverse(V, sing_tol=0.0)
    except Singular:
        return np.full(V.shape[0], np.inf)
    return np.linalg.norm(W, axis=1) * np.linalg.norm(V, axis=0)


def singular_values(A) -> np.ndarray:
    return np.linalg.svd(check_matrix(A, name="A"), compute_uv=False)


def numerical_rank(A, rank_tol: float | None = None) -> int:
    """Number of singular values strictly above ``rank_tol`` (absolute)."""
    A = check_matrix(A, name="A")
    if rank_tol is None:
        rank_tol = default_rank_tol(A)
    return int(np.sum(singular_values(A) > rank_tol))


def cluster_eigenvalues(eigs, gap_tol: float, radii=None) -> list[list[int]]:
    """Single-linkage clusters of indices whose eigenvalues lie within ``gap_tol``.

    With ``radii``, eigenvalues ``i, j`` are also merged when their distance
    is at most ``radii[i] + radii[j]``.
    """
    eigs = np.asarray(eigs)
    radii = np.zeros(len(eigs)) if radii is None else np.asarray(radii)
    n = len(eigs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            dist = abs(eigs[i] - eigs[j])
            if dist <= gap_tol or dist <= radii[i] + radii[j]:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


@dataclass
class DiagReport:
    diagonalizable: bool
    basis: np.ndarray | None = None
    diag: np.ndarray | None = None
    # (eigenvalue, algebraic multiplicity, geometric multiplicity)
    defect_witness: tuple[complex, int, int] | None = None


def diagonalize(
    A,
    gap_tol: float | None = None,
    rank_tol: float | None = None,
    cond_merge: float = DEFAULT_COND_MERGE,
) -> DiagReport:
    """Decide diagonalizability and return ``P, D`` with ``A = P D P^-1`` when it holds.

    Eigenvalues within ``gap_tol`` of each other, or close enough that
    rounding could have split a multiple eigenvalue (see
    ``DEFAULT_COND_MERGE``; ``cond_merge=0`` disables this), are merged.  If
    nothing merges the eigenvector basis is returned.  Otherwise each
    cluster's geometric multiplicity is read off the numerical rank of
    ``A - lambda E`` at ``rank_tol``.
    """
    A = check_square_matrix(A, name="A")
    n = A.shape[0]
    if gap_tol is None:
        gap_tol = default_gap_tol(A)
    if rank_tol is None:
        rank_tol = default_rank_tol(A)
    rep = spectrum(A, gap_tol)
    radii = cond_merge * _EPS * np.linalg.norm(A) * rep.condition
    groups = cluster_eigenvalues(rep.eigenvalues, gap_tol, radii)
    if len(groups) == n:
        return DiagReport(True, rep.eigenvectors, np.diag(rep.eigenvalues))

    columns = []
    values = []
    for group in groups:
        lam = complex(np.mean(rep.eigenvalues[group]))
        alg = len(group)
        if alg == 1:
            columns.append(rep.eigenvectors[:, group])
            values.append(rep.eigenvalues[group])
            continue
        shifted = A - lam * identity(n)
        _, s, vh = np.linalg.svd(shifted)
        geo = n - int(np.sum(s > rank_tol))
        if geo < alg:
            return DiagReport(False, defect_witness=(lam, alg, geo))
        columns.append(vh[n - alg :].conj().T)
        values.append(np.full(alg, lam))
    P = np.hstack(columns)
    try:
        Pinv = inverse(P)
    except Singular:
        # eigenvector blocks of distinct clusters nearly parallel
        return DiagReport(False, defect_witness=None)
    D = np.diag(np.diag(Pinv @ A @ P))
    return DiagReport(True, P, D)


def offdiag_l1(A) -> float:
    A = np.asarray(A)
    return norm_l1(A - np.diag(np.diag(A)))


def commutator(A, B) -> np.ndarray:
    return A @ B - B @ A


@dataclass
class SimultaneousDiagonalization:
    """Outcome of :func:`simultaneously_diagonalizable`.

    ``obstruction`` is set on a negative outcome: either
    ``("commutator", i, j, value)`` or ``("defective", i, witness)``.
    """

    simultaneous: bool
    basis: np.ndarray | None = None
    diagonals: np.ndarray | None = None
    coefficients: np.ndarray | None = None
    tries: int = 0
    obstruction: tuple | None = None

    def __iter__(self):
        # unpacks as (bool, basis)
        return iter((self.simultaneous, self.basis))


def simultaneously_diagonalizable(
    Cs,
    gap_tol: float | None = None,
    rank_tol: float | None = None,
    seed=0,
    sim_tol: float = DEFAULT_SIM_TOL,
    comm_tol: float = DEFAULT_COMM_TOL,
    max_tries: int = 16,
) -> SimultaneousDiagonalization:
    """Decide whether one invertible ``P`` diagonalizes every matrix in ``Cs``.

    A random real combination ``C = sum c_i C_i`` is diagonalized; its basis
    is accepted when it leaves every ``C_i`` diagonal up to ``sim_tol``
    (relative l1).  A negative answer needs a commutator above ``comm_tol``
    or a non-diagonalizable member.  Otherwise the draw is repeated and
    :class:`Inconclusive` is raised after ``max_tries``.

    ``gap_tol`` and ``rank_tol`` are relative to each matrix's l1 norm
    (``None`` means ``1e-8``).
    """
    Cs = [check_square_matrix(C, name=f"Cs[{i}]") for i, C in enumerate(Cs)]
    if not Cs:
        raise DimensionError("need at least one matrix")
    n = Cs[0].shape[0]
    for i, C in enumerate(Cs):
        if C.shape != (n, n):
            raise DimensionError(f"Cs[{i}] has shape {C.shape}, expected {(n, n)}")
    rel_gap = DEFAULT_GAP_TOL if gap_tol is None else gap_tol
    rel_rank = DEFAULT_RANK_TOL if rank_tol is None else rank_tol
    norms = [norm_l1(C) for C in Cs]
    rng = np.random.default_rng(seed)

    negative = None
    for attempt in range(1, max_tries + 1):
        coef = rng.uniform(-1.0, 1.0, size=len(Cs))
        C = sum(c * Ci for c, Ci in zip(coef, Cs))
        scale = norm_l1(C)
        rep = diagonalize(C, rel_gap * scale, rel_rank * scale)
        if rep.diagonalizable:
            P = rep.basis
            try:
                Pinv = inverse(P)
            except Singular:
                Pinv = None
            if Pinv is not None:
                conj = [Pinv @ Ci @ P for Ci in Cs]
                if all(offdiag_l1(Ci) <= sim_tol * nrm for Ci, nrm in zip(conj, norms)):
                    diags = np.array([np.diag(Ci) for Ci in conj])
                    return SimultaneousDiagonalization(True, P, diags, coef, attempt)
        if negative is None:
            negative = _obstruction(Cs, norms, rel_gap, rel_rank, comm_tol)
        if negative is not None:
            return SimultaneousDiagonalization(False, tries=attempt, obstruction=negative)
    raise Inconclusive(f"no decision after {max_tries} generic combinations")


def _obstruction(Cs, norms, rel_gap, rel_rank, comm_tol):
    for i in range(len(Cs)):
        for j in range(i + 1, len(Cs)):
            value = norm_l1(commutator(Cs[i], Cs[j]))
            if value > comm_tol * norms[i] * norms[j]:
                return ("commutator", i, j, value)
    for i, C in enumerate(Cs):
        rep = diagonalize(C, rel_gap * norms[i], rel_rank * norms[i])
        if not rep.diagonalizable:
            return ("defective", i, rep.defect_witness)
    return None
