"""Successive convex approximation for weighted-sum output voltage.

Each iteration linearizes the 4th-order term around the previous
autocorrelation, which leaves ``min x^H A1 x  s.t. ||x||^2 <= P``. That
problem is solved in closed form by the minimum eigenvector of A1.

A1 has the structure ``sum_q w_q D_q^H T_q D_q`` where ``D_q`` maps a
waveform to its tone projections and ``T_q`` is an N x N Hermitian Toeplitz
matrix built from the previous ``t_q``. Nothing of size (MN)^2 is needed
unless a dense matrix is explicitly requested.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .channel import ChannelState
from .config import SystemConfig
from .rectenna import RectennaParams, epigraph_vars, vout

log = logging.getLogger(__name__)

DENSE_MAX_DIM = 512
PSD_THRESHOLD = -1e-12


class EigenSolverError(RuntimeError):
    pass


def hermitian_toeplitz(first_col) -> np.ndarray:
    c = np.asarray(first_col, dtype=complex)
    return toeplitz(c, c.conj())


class HermitianOperator:
    """v -> A v for a Hermitian A, optionally in factored form
    ``A = sum_q H_q^H T_q H_q`` with ``H_q`` block-diagonal (one row per tone)."""

    def __init__(self, dim, matvec=None, dense=None, hblocks=None, tblocks=None):
        self.dim = int(dim)
        self._matvec = matvec
        self._dense = None if dense is None else np.asarray(dense, dtype=complex)
        self.hblocks = hblocks  # (K, N, M)
        self.tblocks = tblocks  # (K, N, N), weights already applied

    @classmethod
    def from_matrix(cls, A) -> "HermitianOperator":
        A = np.asarray(A, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("operator matrix must be square")
        return cls(A.shape[0], dense=A)

    @classmethod
    def from_factors(cls, hblocks, tblocks) -> "HermitianOperator":
        hblocks = np.asarray(hblocks, dtype=complex)
        tblocks = np.asarray(tblocks, dtype=complex)
        K, N, M = hblocks.shape
        return cls(N * M, hblocks=hblocks, tblocks=tblocks)

    @property
    def factored(self) -> bool:
        return self.hblocks is not None

    def apply(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if self._matvec is not None:
            return self._matvec(v)
        if self.factored:
            K, N, M = self.hblocks.shape
            u = np.einsum("qnm,nm->qn", self.hblocks, v.reshape(N, M))
            c = np.einsum("qij,qj->qi", self.tblocks, u)
            return np.einsum("qnm,qn->nm", self.hblocks.conj(), c).ravel()
        return self._dense @ v

    __matmul__ = apply

    def to_dense(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense
        if self.factored:
            K, N, M = self.hblocks.shape
            A = np.zeros((self.dim, self.dim), dtype=complex)
            ones = np.ones((M, M))
            for hq, tq in zip(self.hblocks, self.tblocks):
                h = hq.ravel()
                A += np.outer(h.conj(), h) * np.kron(tq, ones)
            return A
        return np.column_stack([self.apply(e) for e in np.eye(self.dim, dtype=complex)])

    def norm_bound(self) -> float:
        """Cheap upper bound on the spectral norm."""
        if self._dense is not None:
            return float(np.abs(self._dense).sum(axis=1).max())
        if self.factored:
            hn = np.sum(np.abs(self.hblocks) ** 2, axis=2)  # (K, N)
            return float(sum(np.abs(t).sum(axis=1).max() * g.max() for t, g in zip(self.tblocks, hn)))
        return float(np.abs(self.to_dense()).sum(axis=1).max())


def toeplitz_kernel(t_prev, params: RectennaParams, scale2=1.0, scale4=1.0) -> np.ndarray:
    """Hermitian Toeplitz T with ``x^H D^H T D x = 2 Re{c^H t(x)}`` for the linearization at t_prev.

    Diagonal ``-(scale2*beta2 + 3*scale4*beta4*t0)``, superdiagonal k
    ``-3*scale4*beta4*conj(t_k)``.
    """
    t = np.asarray(t_prev, dtype=complex)
    if abs(t[0].imag) > 1e-9 * max(1.0, abs(t[0].real)):
        raise ValueError(f"t_0 must be real, got imaginary part {t[0].imag:g}")
    col = -3 * scale4 * params.beta4 * t  # column below the diagonal carries t_k
    col[0] = -(scale2 * params.beta2 + 3 * scale4 * params.beta4 * t[0].real)
    return hermitian_toeplitz(col)


def build_A1(channels, weights, t_prev, params: RectennaParams) -> HermitianOperator:
    weights = np.asarray(weights, dtype=float)
    if len(channels) != weights.size or len(t_prev) != weights.size:
        raise ValueError("channels, weights and t_prev must all have one entry per user")
    hblocks = np.stack([h.blocks for h in channels])
    tblocks = np.stack([w * toeplitz_kernel(t, params) for w, t in zip(weights, t_prev)])
    return HermitianOperator.from_factors(hblocks, tblocks)


def canonical_phase(u) -> np.ndarray:
    """Rotate u so its first entry with magnitude > 1e-12 is real positive."""
    idx = np.flatnonzero(np.abs(u) > 1e-12)
    if idx.size == 0:
        return u
    lead = u[idx[0]]
    out = u * (np.conj(lead) / abs(lead))
    out[idx[0]] = abs(lead)
    return out


def _reduced_eig(op: HermitianOperator):
    """Eigenpairs of A restricted to range(H^H); returns (w, X) with X orthonormal."""
    K, N, M = op.hblocks.shape
    H = np.zeros((K * N, N * M), dtype=complex)  # row (q, n) holds h_{q,n}^T in block n
    for q in range(K):
        for n in range(N):
            H[q * N + n, n * M:(n + 1) * M] = op.hblocks[q, n]
    W = np.zeros((K * N, K * N), dtype=complex)
    for q in range(K):
        W[q * N:(q + 1) * N, q * N:(q + 1) * N] = op.tblocks[q]
    g, V = np.linalg.eigh(H @ H.conj().T)
    keep = g > 1e-10 * max(g.max(), 0.0) if g.size else g > 0
    if not np.any(keep):
        return np.zeros(0), np.zeros((op.dim, 0), dtype=complex)
    g, V = g[keep], V[:, keep]
    B = np.sqrt(g)[:, None] * V.conj().T  # G = B^H B restricted to its range
    Q = H.conj().T @ V / np.sqrt(g)  # orthonormal basis of range(H^H)
    w, Y = np.linalg.eigh(B @ W @ B.conj().T)
    return w, Q @ Y


def _null_vector(Q: np.ndarray, dim: int) -> np.ndarray:
    """Deterministic unit vector orthogonal to the columns of Q."""
    E = np.eye(dim, dtype=complex)
    R = E - Q @ (Q.conj().T @ E)
    j = int(np.argmax(np.linalg.norm(R, axis=0)))
    v = R[:, j]
    return v / np.linalg.norm(v)


def min_eigenpair(op, dim: int | None = None, method: str = "auto", tol: float = 1e-8):
    """Smallest eigenvalue of a Hermitian operator and its unit eigenvector.

    ``method``: "auto", "dense" (LAPACK), "reduced" (range-space reduction of a
    factored operator) or "lanczos" (ARPACK on the shifted operator).
    """
    if not isinstance(op, HermitianOperator):
        op = HermitianOperator.from_matrix(op)
    dim = op.dim if dim is None else dim
    if dim != op.dim:
        raise ValueError("dimension mismatch")
    if method == "auto":
        if op.factored and op.hblocks.shape[0] * op.hblocks.shape[1] < dim:
            method = "reduced"
        elif dim <= DENSE_MAX_DIM:
            method = "dense"
        else:
            method = "lanczos"

    if method == "dense":
        w, V = np.linalg.eigh(op.to_dense())
        lam, u = float(w[0]), V[:, 0]
    elif method == "reduced":
        if not op.factored:
            raise ValueError("reduced method needs a factored operator")
        w, X = _reduced_eig(op)
        if X.shape[1] == dim or (w.size and w[0] < 0):
            lam, u = float(w[0]), X[:, 0]
        else:
            # the complement of range(H^H) is an exact null space
            lam, u = 0.0, _null_vector(X, dim)
    elif method == "lanczos":
        lam, u = _lanczos_min(op, tol)
    else:
        raise ValueError(f"unknown method {method!r}")

    u = canonical_phase(u / np.linalg.norm(u))
    return lam, u


def _lanczos_min(op: HermitianOperator, tol: float):
    sigma = op.norm_bound()
    if sigma == 0.0:
        u = np.zeros(op.dim, dtype=complex)
        u[0] = 1.0
        return 0.0, u
    shifted = LinearOperator((op.dim, op.dim), matvec=lambda v: sigma * v - op.apply(v), dtype=complex)
    v0 = np.full(op.dim, 1.0 / np.sqrt(op.dim), dtype=complex)
    try:
        mu, V = eigsh(shifted, k=1, which="LA", v0=v0, tol=tol * 1e-3, maxiter=20 * op.dim)
    except ArpackNoConvergence as exc:
        raise EigenSolverError("Lanczos did not converge") from exc
    u = V[:, 0] / np.linalg.norm(V[:, 0])
    lam = float(np.vdot(u, op.apply(u)).real)
    if np.linalg.norm(op.apply(u) - lam * u) > tol * sigma:
        raise EigenSolverError("Lanczos eigenvector residual above tolerance")
    return lam, u


def solve_qcqp(op, P: float, **kw):
    """argmin x^H A x subject to ||x||^2 <= P. Returns (x, objective)."""
    if not P > 0:
        raise ValueError("P must be > 0")
    if not isinstance(op, HermitianOperator):
        op = HermitianOperator.from_matrix(op)
    lam, u = min_eigenpair(op, **kw)
    if lam >= PSD_THRESHOLD:
        return np.zeros(op.dim, dtype=complex), 0.0
    return np.sqrt(P) * u, P * lam


def init_waveform(channels, cfg: SystemConfig) -> np.ndarray:
    """Per-tone matched filter towards the highest-weight user, power P/N per tone."""
    q = int(np.argmax(cfg.weights))
    return _matched_uniform(channels[q], cfg.P)


def _matched_uniform(h: ChannelState, P: float) -> np.ndarray:
    blocks = h.blocks.conj()
    norms = np.linalg.norm(blocks, axis=1)
    dirs = np.empty_like(blocks)
    for n in range(h.N):
        if norms[n] > 0:
            dirs[n] = blocks[n] / norms[n]
        else:
            dirs[n] = 1.0 / np.sqrt(h.M)
    return np.sqrt(P / h.N) * dirs.ravel()


def rank1_distance(a, b) -> float:
    """||aa^H - bb^H||_F / ||aa^H||_F without forming either matrix."""
    na2 = float(np.vdot(a, a).real)
    nb2 = float(np.vdot(b, b).real)
    if na2 == 0.0:
        return 0.0 if nb2 == 0.0 else np.inf
    d2 = na2**2 + nb2**2 - 2 * abs(np.vdot(a, b)) ** 2
    return float(np.sqrt(max(d2, 0.0)) / na2)


@dataclass
class ScaState:
    iteration: int
    s: np.ndarray
    t: list
    objective: float
    metric: float


@dataclass
class ScaTrace:
    states: list = field(default_factory=list)
    converged: bool = False

    @property
    def objectives(self) -> np.ndarray:
        return np.array([st.objective for st in self.states])

    @property
    def iterations(self) -> int:
        return self.states[-1].iteration if self.states else 0

    def records(self):
        """(iteration, objective, metric) rows for export."""
        return [(st.iteration, st.objective, st.metric) for st in self.states]


def sca_solve(channels, weights, cfg: SystemConfig, params: RectennaParams, s0=None, method="auto"):
    """Successive convex approximation for the weighted voltage sum. Returns ``(s, trace)``; objective is -sum_q w_q vout_q."""
    weights = np.asarray(weights, dtype=float)
    if weights.size != len(channels):
        raise ValueError("one weight per user required")
    if np.any(weights < 0) or not np.any(weights > 0):
        raise ValueError("weights must be nonnegative with at least one positive entry")

    def objective(x):
        return -sum(w * vout(h, x, params) for w, h in zip(weights, channels))

    s = init_waveform(channels, cfg) if s0 is None else np.asarray(s0, dtype=complex)
    t = [epigraph_vars(h, s) for h in channels]
    trace = ScaTrace([ScaState(0, s, t, objective(s), np.inf)])

    for it in range(1, cfg.max_iters + 1):
        A1 = build_A1(channels, weights, t, params)
        x, _ = solve_qcqp(A1, cfg.P, method=method)
        t = [epigraph_vars(h, x) for h in channels]
        # zero operator (e.g. all-zero channels): x = 0 is final
        metric = 0.0 if A1.norm_bound() == 0.0 else rank1_distance(x, s)
        trace.states.append(ScaState(it, x, t, objective(x), metric))
        s = x
        if metric <= cfg.epsilon:
            trace.converged = True
            break

    if not trace.converged:
        log.info("SCA hit max_iters=%d without converging", cfg.max_iters)
        best = min(trace.states, key=lambda st: st.objective)
        return best.s, trace
    return s, trace
