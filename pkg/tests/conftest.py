import numpy as np
import pytest

from wpt.channel import ChannelState
from wpt.rectenna import RectennaParams


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_channel(rng, M, N, lam=1.0):
    return ChannelState(np.sqrt(lam / 2) * crandn(rng, M * N), lam, M, N)


def random_waveform(rng, dim, P=1.0):
    s = crandn(rng, dim)
    return s * np.sqrt(P) / np.linalg.norm(s)


def count_below(A, sigma):
    """Eigenvalues of Hermitian A below sigma, by Sylvester inertia of the LDL^H pivots."""
    B = A - sigma * np.eye(A.shape[0])
    neg = 0
    n = B.shape[0]
    B = B.astype(complex).copy()
    for i in range(n):
        d = B[i, i].real
        neg += d < 0
        if i + 1 < n:
            B[i + 1:, i + 1:] -= np.outer(B[i + 1:, i], B[i, i + 1:]) / d
    return neg


def bisect_min_eig(A, tol=1e-13):
    r = np.abs(A).sum(axis=1).max()
    lo, hi = -r - 1, r + 1
    while hi - lo > tol * max(1.0, r):
        mid = 0.5 * (lo + hi)
        if count_below(A, mid) >= 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@pytest.fixture
def params():
    return RectennaParams()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
