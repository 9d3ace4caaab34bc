"""Rank-n approximation of ``n x n x 2`` tensors and the rank-leap family.

Any pencil ``[A_1 | A_2]`` is approached by pencils ``[B_1 | B_2]`` whose
slices are invertible with simple spectra and whose ratio ``B_2 B_1^-1``
also has a simple spectrum; those have rank exactly ``n``.  Because the
perturbations can be made arbitrarily small, rank-``<= n`` tensors are dense
and a best rank-``n`` approximation generally does not exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .exceptions import PerturbationFailed, Singular
from .rank import RankCertificate, Verdict, bi_rank_check, max_rank_value
from .tensor import from_slices, norm_l1
from .validation import check_positive, check_square_matrix, check_tensor


@dataclass
class PerturbationOutcome:
    A_eps: np.ndarray
    B_eps: np.ndarray
    deviations: tuple[float, float]
    spectra: tuple[linalg.SpectrumReport, linalg.SpectrumReport, linalg.SpectrumReport]
    attempts: int
    seed: int | None
    scale: float


def resolved_simple(A, gap_tol: float | None = None) -> tuple[bool, linalg.SpectrumReport]:
    """Simple spectrum at ``gap_tol`` (relative) that :func:`diagonalize` will also resolve."""
    rel = linalg.DEFAULT_GAP_TOL if gap_tol is None else gap_tol
    rep = linalg.spectrum(A, rel * linalg.norm_l1(A))
    if not rep.simple:
        return False, rep
    radii = linalg.DEFAULT_COND_MERGE * np.finfo(float).eps * np.linalg.norm(A) * rep.condition
    groups = linalg.cluster_eigenvalues(rep.eigenvalues, rep.gap_tol, radii)
    return len(groups) == len(rep.eigenvalues), rep


def _complex_noise(rng, shape, scale: float) -> np.ndarray:
    # modulus uniform in [0, scale), so every entry is strictly below scale
    modulus = scale * rng.random(shape)
    phase = np.exp(2j * np.pi * rng.random(shape))
    return modulus * phase


def perturb_simple_pair(
    A,
    B,
    eps: float,
    seed: int | None = 0,
    max_attempts: int = 256,
    gap_tol: float | None = None,
    sing_tol: float = linalg.DEFAULT_SING_TOL,
) -> PerturbationOutcome:
    """Find invertible ``A_eps, B_eps`` with simple spectra within ``eps`` (l1) of ``A, B``
    such that ``A_eps B_eps^-1`` also has a simple spectrum.

    Random complex perturbations with entries of modulus below ``s`` are
    drawn, starting at ``s = eps / (4 n^2)`` and halving ``s`` after every 8
    rejected draws.  ``gap_tol`` is relative to each matrix's l1 norm.
    """
    A = check_square_matrix(A, "A")
    B = check_square_matrix(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"A and B must have the same order, got {A.shape} and {B.shape}")
    eps = check_positive(eps, "eps")
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    s = eps / (4 * n * n)
    failures = 0
    for attempt in range(1, max_attempts + 1):
        A_eps = A + _complex_noise(rng, A.shape, s)
        B_eps = B + _complex_noise(rng, B.shape, s)
        devs = (norm_l1(A - A_eps), norm_l1(B - B_eps))
        ok = devs[0] < eps and devs[1] < eps
        if ok:
            try:
                B_inv = linalg.inverse(B_eps, sing_tol)
                linalg.inverse(A_eps, sing_tol)
            except Singular:
                ok = False
        if ok:
            reports = []
            for M in (A_eps, B_eps, A_eps @ B_inv):
                good, rep = resolved_simple(M, gap_tol)
                reports.append(rep)
                if not good:
                    ok = False
                    break
        if ok:
            return PerturbationOutcome(A_eps, B_eps, devs, tuple(reports), attempt, seed, s)
        failures += 1
        if failures % 8 == 0:
            s /= 2
    raise PerturbationFailed(
        f"no admissible perturbation in {max_attempts} attempts (eps={eps:g}); "
        "check gap_tol against eps"
    )


@dataclass
class Approximation:
    """Result of :func:`rank_n_approximate`; unpacks as ``(B, cert, deviation)``."""

    B: np.ndarray
    certificate: RankCertificate
    deviation: float
    outcome: PerturbationOutcome
    rounds: int

    def __iter__(self):
        return iter((self.B, self.certificate, self.deviation))


def rank_n_approximate(
    A,
    eps: float,
    seed: int | None = 0,
    max_attempts: int = 256,
    gap_tol: float | None = None,
    max_rounds: int = 4,
) -> Approximation:
    """A certified rank-``n`` tensor within ``eps`` (l1) of ``A in C^{n x n x 2}``.

    Each slice receives half of the budget.  The ratio of the perturbed
    slices has a simple spectrum, so the simultaneous-diagonalization check
    certifies rank ``n``; the certificate is recomputed, not assumed.  If it
    comes back negative a fresh perturbation is drawn (``max_rounds``).
    """
    A = check_tensor(A, square=True, n_slices=2)
    eps = check_positive(eps, "eps")
    seeds = np.random.SeedSequence(seed).spawn(max_rounds)
    for rounds, child in enumerate(seeds, start=1):
        pert_seed, cert_seed = (int(x) for x in child.generate_state(2))
        # roles arranged so that the ratio B_2 B_1^-1 is the simple product
        outcome = perturb_simple_pair(
            A[:, :, 1], A[:, :, 0], eps / 2, pert_seed, max_attempts, gap_tol
        )
        B = from_slices([outcome.B_eps, outcome.A_eps])
        cert = bi_rank_check(B, gap_tol=gap_tol, seed=cert_seed)
        deviation = norm_l1(A - B)
        if cert.verdict is Verdict.RANK_EQUALS_M and deviation < eps:
            return Approximation(B, cert, deviation, outcome, rounds)
    raise PerturbationFailed(f"no certified rank-n approximation after {max_rounds} rounds")


@dataclass
class LeapFamily:
    """``A = [E | J]`` with ``J`` a direct sum of ``n`` 2x2 Jordan blocks, and
    ``A_k`` obtained by moving each block's lower-right entry by ``1/k``.

    ``A_k`` has rank ``2n`` and tends to ``A``, whose rank is ``3n``.
    """

    n: int
    eigenvalues: np.ndarray
    A: np.ndarray

    @property
    def claimed_rank_A(self) -> int:
        return 3 * self.n

    @property
    def certified_rank_Ak(self) -> int:
        return 2 * self.n

    def member(self, k) -> np.ndarray:
        if k <= 0:
            raise ValueError(f"k must be positive, got {k!r}")
        Ak = self.A.copy()
        for i, mu in enumerate(self.eigenvalues):
            # mu is purely imaginary, so mu + 1/k is exact and |entry - mu| == 1/k bit for bit
            Ak[2 * i + 1, 2 * i + 1, 1] = complex(1.0 / k, mu.imag)
        return Ak

    __call__ = member

    def expected_deviation(self, k) -> float:
        return self.n / k

    def deviation(self, k) -> float:
        return norm_l1(self.member(k) - self.A)


def leap_eigenvalues(n: int, seed=0, min_gap: float = 0.1) -> np.ndarray:
    """``n`` distinct purely imaginary values with pairwise gaps of at least ``min_gap``."""
    rng = np.random.default_rng(seed)
    half_width = max(1.0, n * min_gap)
    for _ in range(10_000):
        b = rng.uniform(-half_width, half_width, size=n)
        if n == 1 or np.min(np.diff(np.sort(b))) >= min_gap:
            return 1j * b
    raise RuntimeError("could not draw well separated eigenvalues")  # pragma: no cover


def build_leap_family(n: int, eigenvalue_seed=0, min_gap: float = 0.1) -> LeapFamily:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    mu = leap_eigenvalues(n, eigenvalue_seed, min_gap)
    J = np.zeros((2 * n, 2 * n), dtype=complex)
    for i, value in enumerate(mu):
        J[2 * i, 2 * i] = value
        J[2 * i, 2 * i + 1] = 1.0
        J[2 * i + 1, 2 * i + 1] = value
    return LeapFamily(n, mu, from_slices([linalg.identity(2 * n), J]))


def leap_report(family: LeapFamily, ks, seed: int | None = 0) -> dict:
    """Norms and certificates for the family at each ``k`` plus the limit."""
    members = []
    for k in ks:
        cert = bi_rank_check(family.member(k), seed=seed)
        dev = family.deviation(k)
        members.append(
            {
                "k": k,
                "l1_deviation": dev,
                "expected_deviation": family.expected_deviation(k),
                "deviation_matches": math.isclose(dev, family.n / k, rel_tol=4 * np.finfo(float).eps),
                "certificate": cert.to_doc(),
            }
        )
    return {
        "n": family.n,
        "dims": list(family.A.shape),
        "eigenvalues": family.eigenvalues,
        "claimed_rank_A": family.claimed_rank_A,
        "max_rank_value": max_rank_value(2 * family.n),
        "limit_certificate": bi_rank_check(family.A, seed=seed).to_doc(),
        "members": members,
    }
