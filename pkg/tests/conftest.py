import itertools
import sys

import numpy as np
import pytest

EXAMPLE = np.stack([[[1, 0], [0, -1]], [[0, -1], [-1, 0]]], axis=2).astype(complex)
W_TENSOR = np.stack([np.eye(2), [[0, 1], [0, 0]]], axis=2).astype(complex)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def naive_matmul(A, B):
    A, B = np.asarray(A, complex), np.asarray(B, complex)
    out = np.zeros((A.shape[0], B.shape[1]), complex)
    for i in range(A.shape[0]):
        for j in range(B.shape[1]):
            for k in range(A.shape[1]):
                out[i, j] += A[i, k] * B[k, j]
    return out


def naive_act(L, M, N, A):
    """b_pqr = sum_ijk L[p,i] M[q,j] N[r,k] A[i,j,k], by explicit loops."""
    l, m, n = A.shape
    B = np.zeros((L.shape[0], M.shape[0], N.shape[0]), complex)
    for p, q, r in itertools.product(range(L.shape[0]), range(M.shape[0]), range(N.shape[0])):
        total = 0j
        for i, j, k in itertools.product(range(l), range(m), range(n)):
            total += L[p, i] * M[q, j] * N[r, k] * A[i, j, k]
        B[p, q, r] = total
    return B


def charpoly_roots(A):
    """Eigenvalues as roots of the characteristic polynomial (Faddeev-LeVerrier + companion)."""
    A = np.asarray(A, complex)
    n = A.shape[0]
    coeffs = [1.0 + 0j]
    Mk = np.zeros_like(A)
    for k in range(1, n + 1):
        Mk = A @ Mk + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(A @ Mk) / k)
    return np.roots(coeffs)


def match_multisets(a, b):
    """Largest distance under the best greedy matching of two multisets of complex numbers."""
    b = list(b)
    worst = 0.0
    for x in a:
        j = int(np.argmin([abs(x - y) for y in b]))
        worst = max(worst, abs(x - b[j]))
        b.pop(j)
    return worst


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture
def example():
    return EXAMPLE.copy()


@pytest.fixture
def w_tensor():
    return W_TENSOR.copy()


def pytest_terminal_summary(terminalreporter):
    modules = [m for name, m in list(sys.modules.items()) if name.endswith("test_acceptance")]
    lines = getattr(modules[0], "RESULTS", None) if modules else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
