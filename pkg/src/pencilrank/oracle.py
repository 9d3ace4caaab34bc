"""Brute-force rank evidence by alternating least squares (tiny tensors only).

A fit with relative Frobenius residual below ``oracle_tol`` shows
``rank <= r``.  Failure to fit is evidence, not proof.  Near tensors whose
border rank is lower than their rank, ALS can push the residual down only by
letting factor norms blow up; such restarts are flagged as diverging and do
not count as fits.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .tensor import CPDecomposition
from .validation import check_tensor

ORACLE_MAX_DIM = 4
DEFAULT_ORACLE_TOL = 1e-7
DEFAULT_DIVERGE_NORM = 1e6


@dataclass
class RestartResult:
    residual: float
    iterations: int
    factor_norm: float
    diverging: bool


@dataclass
class ALSReport:
    target_rank: int
    best_residual: float
    restarts: int
    iterations_used: int
    oracle_tol: float
    decomposition: CPDecomposition | None = None
    # lowest-residual non-diverging fit, present even when it is not a fit
    best_decomposition: CPDecomposition | None = None
    # best residual over all restarts, diverging ones included
    best_residual_any: float = np.inf
    diverging_restarts: int = 0
    seed: int | None = None
    history: list[RestartResult] = field(default_factory=list, repr=False)

    @property
    def fits(self) -> bool:
        return self.decomposition is not None

    def to_doc(self) -> dict:
        doc = {
            "target_rank": self.target_rank,
            "best_residual": self.best_residual,
            "best_residual_including_diverging": self.best_residual_any,
            "restarts": self.restarts,
            "diverging_restarts": self.diverging_restarts,
            "iterations_used": self.iterations_used,
            "oracle_tol": self.oracle_tol,
            "seed": self.seed,
            "norm": "relative Frobenius",
            "decision": oracle_decision_from_report(self).value,
        }
        if self.decomposition is not None:
            d = self.decomposition
            doc["cp"] = {"rank": d.rank, "X": d.X, "Y": d.Y, "Z": d.Z}
        return doc


class OracleDecision(str, enum.Enum):
    AT_MOST_R = "AtMostR"
    NO_FIT_FOUND = "NoFitFound"


def _update(A, F1, F2, spec):
    # least-squares update of one factor with the other two fixed
    gram = (F1.conj().T @ F1) * (F2.conj().T @ F2)
    rhs = np.einsum(spec, A, F1.conj(), F2.conj())
    try:
        return np.linalg.solve(gram, rhs).T
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(gram, rhs, rcond=None)[0].T


def _relative_residual(A, X, Y, Z, normA):
    return float(np.linalg.norm(A - np.einsum("ir,jr,kr->ijk", X, Y, Z)) / normA)


def _als_restart(A, r, rng, max_iters, improve_tol, floor, extrapolate):
    l, m, n = A.shape
    normA = np.linalg.norm(A)

    def draw(d):
        return rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))

    X, Y, Z = draw(l), draw(m), draw(n)
    prev = np.inf
    res = np.inf
    it = 0
    for it in range(1, max_iters + 1):
        old = (X, Y, Z)
        X = _update(A, Y, Z, "ijk,jr,kr->ri")
        Y = _update(A, X, Z, "ijk,ir,kr->rj")
        Z = _update(A, X, Y, "ijk,ir,jr->rk")
        res = _relative_residual(A, X, Y, Z, normA)
        if extrapolate and it > 1:
            # line search along the last sweep's update, step it**(1/3); kept only if it helps
            step = it ** (1.0 / 3.0)
            trial = [new + step * (new - o) for new, o in zip((X, Y, Z), old)]
            trial_res = _relative_residual(A, *trial, normA)
            if trial_res < res:
                X, Y, Z = trial
                res = trial_res
        if res <= floor or prev - res < improve_tol:
            break
        prev = res
    return X, Y, Z, res, it


def als_fit(
    A,
    r: int,
    restarts: int = 10,
    max_iters: int = 2000,
    oracle_tol: float = DEFAULT_ORACLE_TOL,
    seed: int | None = 0,
    improve_tol: float = 1e-10,
    diverge_norm: float = DEFAULT_DIVERGE_NORM,
    stop_on_fit: bool = False,
    extrapolate: bool = True,
    max_dim: int = ORACLE_MAX_DIM,
) -> ALSReport:
    """Fit ``r`` rank-one terms to ``A`` from ``restarts`` random starts.

    Each restart alternates exact least-squares updates of the three factor
    matrices (followed, with ``extrapolate``, by an accept-if-better
    extrapolation step along the sweep's update) until the relative residual improves by less than
    ``improve_tol`` or ``max_iters`` sweeps pass.  A restart is *diverging*
    when its largest term norm ``||x_i|| ||y_i|| ||z_i||`` exceeds
    ``diverge_norm * ||A||_F``; diverging restarts never count as fits.
    ``best_residual`` is the minimum over the non-diverging restarts.
    """
    A = check_tensor(A)
    if max(A.shape) > max_dim:
        raise ValueError(f"oracle is limited to dims <= {max_dim}, got {A.shape}")
    if isinstance(r, bool) or int(r) != r or r < 1:
        raise ValueError(f"r must be a positive integer, got {r!r}")
    r = int(r)
    normA = np.linalg.norm(A)
    report = ALSReport(r, np.inf, 0, 0, oracle_tol, seed=seed)
    if normA == 0.0:
        z = np.zeros
        report.best_residual = report.best_residual_any = 0.0
        report.decomposition = report.best_decomposition = CPDecomposition(
            z((A.shape[0], r)), z((A.shape[1], r)), z((A.shape[2], r))
        )
        return report
    best = None
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(restarts)]
    for rng in rngs:
        X, Y, Z, res, its = _als_restart(
            A, r, rng, max_iters, improve_tol, 1e-15, extrapolate
        )
        term_norms = (
            np.linalg.norm(X, axis=0) * np.linalg.norm(Y, axis=0) * np.linalg.norm(Z, axis=0)
        )
        fnorm = float(term_norms.max() / normA)
        diverging = fnorm > diverge_norm
        report.history.append(RestartResult(res, its, fnorm, diverging))
        report.restarts += 1
        report.iterations_used += its
        report.best_residual_any = min(report.best_residual_any, res)
        if diverging:
            report.diverging_restarts += 1
            continue
        if res < report.best_residual:
            report.best_residual = res
            best = (X, Y, Z)
        if stop_on_fit and res <= oracle_tol:
            break
    if best is not None:
        report.best_decomposition = CPDecomposition(*best)
        if report.best_residual <= oracle_tol:
            report.decomposition = report.best_decomposition
    return report


def oracle_decision_from_report(report: ALSReport) -> OracleDecision:
    return OracleDecision.AT_MOST_R if report.fits else OracleDecision.NO_FIT_FOUND


def oracle_rank_decision(A, r: int, **params) -> OracleDecision:
    """``AtMostR`` iff ALS finds a non-diverging fit with residual within ``oracle_tol``."""
    return oracle_decision_from_report(als_fit(A, r, **params))
