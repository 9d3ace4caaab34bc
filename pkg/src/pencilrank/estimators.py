"""scikit-learn style wrappers around the functional API.

Hyper-parameters go to ``__init__`` and are exposed through
``get_params``/``set_params``; results are stored as trailing-underscore
attributes by ``fit``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import linalg
from .approximation import rank_n_approximate
from .group_action import GLTriple, act, inverse
from .oracle import DEFAULT_DIVERGE_NORM, DEFAULT_ORACLE_TOL, als_fit
from .rank import DEFAULT_CERT_TOL, bi_rank_check
from .validation import check_tensor


def _seed(random_state):
    if random_state is None or isinstance(random_state, (int, np.integer)):
        return random_state
    raise TypeError("random_state must be an int or None so runs stay reproducible")


class BiRankCertifier(BaseEstimator):
    """Certify ``rank == m`` for square-slice tensors.

    >>> import numpy as np
    >>> A = np.stack([[[1, 0], [0, -1]], [[0, -1], [-1, 0]]], axis=2)
    >>> BiRankCertifier().fit(A).verdict_
    'RankEqualsM'
    """

    def __init__(
        self,
        gap_tol=None,
        rank_tol=None,
        sim_tol=linalg.DEFAULT_SIM_TOL,
        comm_tol=linalg.DEFAULT_COMM_TOL,
        cert_tol=DEFAULT_CERT_TOL,
        max_tries=16,
        random_state=0,
    ):
        self.gap_tol = gap_tol
        self.rank_tol = rank_tol
        self.sim_tol = sim_tol
        self.comm_tol = comm_tol
        self.cert_tol = cert_tol
        self.max_tries = max_tries
        self.random_state = random_state

    def _certify(self, X):
        return bi_rank_check(
            X,
            gap_tol=self.gap_tol,
            rank_tol=self.rank_tol,
            sim_tol=self.sim_tol,
            comm_tol=self.comm_tol,
            cert_tol=self.cert_tol,
            seed=_seed(self.random_state),
            max_tries=self.max_tries,
        )

    def fit(self, X, y=None):
        self.certificate_ = self._certify(X)
        self.verdict_ = self.certificate_.verdict.value
        self.decomposition_ = self.certificate_.decomposition
        self.rank_ = self.certificate_.m if self.certificate_.rank_equals_m else None
        return self

    def predict(self, X):
        """Verdict strings for a single tensor or a stack of shape ``(N, m, m, n)``."""
        X = np.asarray(X)
        if X.ndim == 3:
            return np.array([self._certify(X).verdict.value])
        return np.array([self._certify(T).verdict.value for T in X])


class RankNApproximator(TransformerMixin, BaseEstimator):
    """Replace an ``n x n x 2`` tensor by a certified rank-``n`` tensor within ``eps`` (l1)."""

    def __init__(self, eps=1e-6, max_attempts=256, gap_tol=None, random_state=0):
        self.eps = eps
        self.max_attempts = max_attempts
        self.gap_tol = gap_tol
        self.random_state = random_state

    def _approximate(self, X):
        return rank_n_approximate(
            X, self.eps, seed=_seed(self.random_state), max_attempts=self.max_attempts, gap_tol=self.gap_tol
        )

    def fit(self, X, y=None):
        result = self._approximate(X)
        self.approximation_ = result.B
        self.certificate_ = result.certificate
        self.deviation_ = result.deviation
        self.attempts_ = result.outcome.attempts
        return self

    def transform(self, X):
        check_is_fitted(self, "approximation_")
        return self._approximate(X).B

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X).approximation_


class CPALS(TransformerMixin, BaseEstimator):
    """Rank-``rank`` CP fit by alternating least squares with random restarts.

    ``transform`` ignores its argument and returns the reconstruction of the
    best fit found by ``fit``.
    """

    def __init__(
        self,
        rank=2,
        restarts=10,
        max_iter=2000,
        oracle_tol=DEFAULT_ORACLE_TOL,
        diverge_norm=DEFAULT_DIVERGE_NORM,
        random_state=0,
    ):
        self.rank = rank
        self.restarts = restarts
        self.max_iter = max_iter
        self.oracle_tol = oracle_tol
        self.diverge_norm = diverge_norm
        self.random_state = random_state

    def fit(self, X, y=None):
        self.report_ = als_fit(
            X,
            self.rank,
            restarts=self.restarts,
            max_iters=self.max_iter,
            oracle_tol=self.oracle_tol,
            seed=_seed(self.random_state),
            diverge_norm=self.diverge_norm,
        )
        self.decomposition_ = self.report_.best_decomposition
        self.residual_ = self.report_.best_residual
        return self

    def transform(self, X=None):
        check_is_fitted(self, "report_")
        if self.decomposition_ is None:
            raise ValueError("every restart diverged; no reconstruction available")
        return self.decomposition_.to_tensor()


class MultilinearTransform(TransformerMixin, BaseEstimator):
    """``A -> (L, M, N) . A``; ``inverse_transform`` applies the inverse triple."""

    def __init__(self, L=None, M=None, N=None, sing_tol=linalg.DEFAULT_SING_TOL):
        self.L = L
        self.M = M
        self.N = N
        self.sing_tol = sing_tol

    def fit(self, X=None, y=None):
        if X is not None:
            X = check_tensor(X)
        factors = [self.L, self.M, self.N]
        if any(F is None for F in factors):
            if X is None:
                raise ValueError("L, M and N are required when no tensor is given")
            factors = [linalg.identity(d) if F is None else F for F, d in zip(factors, X.shape)]
        self.group_element_ = GLTriple(*factors, sing_tol=self.sing_tol)
        return self

    def transform(self, X):
        check_is_fitted(self, "group_element_")
        return act(self.group_element_, X)

    def inverse_transform(self, X):
        check_is_fitted(self, "group_element_")
        return act(inverse(self.group_element_), X)
