"""Large-antenna-count waveform design (sequential approximation).

As M grows, inner products of i.i.d. channels harden to ``M * Lambda_q`` and
the voltage depends only on per-user frequency weights ``p_q`` (length N).
The optimizer works on the stacked vector ``p = [p_1; ...; p_K]`` under
``sum_q Lambda_q ||p_q||^2 = 1`` and is then lifted back to a finite-M
waveform ``s_n = sqrt(E/M) sum_q xi_{q,n} conj(h_{q,n}) / sqrt(M)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .config import SystemConfig
from .rectenna import RectennaParams, autocorrelation
from .sca import canonical_phase, toeplitz_kernel

log = logging.getLogger(__name__)


@dataclass
class AsymptoticAllocation:
    p: list  # per-user complex arrays of length N
    E: float
    lambdas: np.ndarray

    @property
    def stacked(self) -> np.ndarray:
        return np.concatenate(self.p)

    def constraint(self) -> float:
        return float(sum(lam * np.vdot(pq, pq).real for lam, pq in zip(self.lambdas, self.p)))


def vout_asymptotic(p, lam: float, E: float, params: RectennaParams,
                    beta2: float | None = None, beta4: float | None = None) -> float:
    b2 = params.beta2 if beta2 is None else beta2
    b4 = params.beta4 if beta4 is None else beta4
    t = autocorrelation(p)
    t0 = t[0].real
    return float(b2 * E * lam**2 * t0
                 + 1.5 * b4 * E**2 * lam**4 * t0**2
                 + 3 * b4 * E**2 * lam**4 * np.sum(np.abs(t[1:]) ** 2))


def vout_uniform_closed_form(N: int, E: float, lam: float, params: RectennaParams) -> float:
    """Asymptotic voltage with power spread uniformly over the N tones."""
    if N < 1:
        raise ValueError("N must be >= 1")
    b2, b4 = params.beta2, params.beta4
    return b2 * E * lam + 1.5 * b4 * E**2 * lam**2 + b4 * E**2 * lam**2 * N * (N - 1) * (2 * N - 1) / (2 * N**2)


def build_Aprime1(t_prev, weights, lambdas, E: float, params: RectennaParams) -> list[np.ndarray]:
    """Weighted per-user N x N blocks of the (block-diagonal) A'_1."""
    weights = np.asarray(weights, dtype=float)
    lambdas = np.asarray(lambdas, dtype=float)
    if not (len(t_prev) == weights.size == lambdas.size):
        raise ValueError("t_prev, weights and lambdas must have one entry per user")
    N = len(t_prev[0])
    blocks = []
    for t, w, lam in zip(t_prev, weights, lambdas):
        if len(t) != N:
            raise ValueError("all users need autocorrelations of the same length")
        blocks.append(w * toeplitz_kernel(t, params, scale2=E * lam**2, scale4=E**2 * lam**4))
    return blocks


def block_diag(blocks) -> np.ndarray:
    from scipy.linalg import block_diag as _bd
    return _bd(*blocks)


def sa_step(blocks, lambdas, prefer: int | None = None) -> tuple[list[np.ndarray], float]:
    """Minimize p^H A'_1 p subject to p^H Lambda p = 1.

    The generalized eigenproblem decouples per user: each block's best value is
    ``lambda_min(w_q A'_q) / Lambda_q`` with vector ``u / sqrt(Lambda_q)``.
    Ties between users go to ``prefer`` if given, else the lowest index.
    Returns the per-user allocation and the attained objective.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(lambdas <= 0):
        raise ValueError("all large-scale gains must be positive")
    vals, vecs = [], []
    for A, lam in zip(blocks, lambdas):
        w, V = np.linalg.eigh(A)
        vals.append(w[0] / lam)
        vecs.append(V[:, 0] / np.sqrt(lam))
    vals = np.array(vals)
    best = float(vals.min())
    ties = np.flatnonzero(vals <= best + 1e-12 * max(abs(best), 1e-300))
    q = prefer if prefer is not None and prefer in ties else int(ties[0])
    N = blocks[0].shape[0]
    p = [np.zeros(N, dtype=complex) for _ in blocks]
    p[q] = canonical_phase(vecs[q])
    return p, best


def sa_step_joint(blocks, lambdas) -> tuple[np.ndarray, float]:
    """Same problem solved on the full KN x KN pencil (reference path)."""
    from scipy.linalg import eigh

    lam_diag = np.repeat(np.asarray(lambdas, dtype=float), blocks[0].shape[0])
    w, V = eigh(block_diag(blocks), np.diag(lam_diag).astype(complex))
    u = V[:, 0]
    u = u / np.sqrt(np.vdot(u, lam_diag * u).real)
    return canonical_phase(u), float(w[0])


def weighted_asymptotic_objective(p, weights, lambdas, E, params) -> float:
    return float(sum(w * vout_asymptotic(pq, lam, E, params) for pq, w, lam in zip(p, weights, lambdas)))


@dataclass
class SaTrace:
    objectives: list = field(default_factory=list)  # weighted asymptotic voltage, ascending
    metrics: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.metrics)


def _aligned_change(new, old) -> float:
    """||new - e^{j phi} old|| / ||new|| with the best global phase phi."""
    phi = np.angle(np.vdot(old, new))
    return float(np.linalg.norm(new - np.exp(1j * phi) * old) / np.linalg.norm(new))


def sa_solve(cfg: SystemConfig, lambdas, weights, params: RectennaParams,
             tie_break: str = "lowest", rng=None):
    """Large-M successive allocation over tone powers. Returns ``(AsymptoticAllocation, SaTrace)``.

    ``tie_break="random"`` picks the initial user uniformly among the
    highest-weight users (uses ``rng``); the default is the lowest index.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if np.any(lambdas <= 0):
        raise ValueError("all large-scale gains must be positive")
    if np.any(weights < 0) or not np.any(weights > 0):
        raise ValueError("weights must be nonnegative with at least one positive entry")
    K, N, E = lambdas.size, cfg.N, cfg.E

    top = np.flatnonzero(weights == weights.max())
    if tie_break == "random":
        rng = np.random.default_rng() if rng is None else rng
        q0 = int(rng.choice(top))
    elif tie_break == "lowest":
        q0 = int(top[0])
    else:
        raise ValueError(f"unknown tie_break {tie_break!r}")
    p = [np.zeros(N, dtype=complex) for _ in range(K)]
    p[q0] = np.full(N, 1.0 / np.sqrt(N * lambdas[q0]), dtype=complex)

    trace = SaTrace([weighted_asymptotic_objective(p, weights, lambdas, E, params)])
    for _ in range(cfg.max_iters):
        t = [autocorrelation(pq) for pq in p]
        blocks = build_Aprime1(t, weights, lambdas, E, params)
        owner = int(np.argmax([np.vdot(pq, pq).real for pq in p]))
        p_new, _ = sa_step(blocks, lambdas, prefer=owner)
        metric = _aligned_change(np.concatenate(p_new), np.concatenate(p))
        p = p_new
        trace.objectives.append(weighted_asymptotic_objective(p, weights, lambdas, E, params))
        trace.metrics.append(metric)
        if metric <= cfg.epsilon:
            trace.converged = True
            break
    if not trace.converged:
        log.info("SA hit max_iters=%d without converging", cfg.max_iters)
    return AsymptoticAllocation(p, E, lambdas), trace


def lift_to_waveform(alloc: AsymptoticAllocation, channels, cfg: SystemConfig, clip: bool = True) -> np.ndarray:
    """Finite-M waveform from the frequency weights, scaled down if it exceeds P."""
    if len(channels) != len(alloc.p):
        raise ValueError("one channel per user required")
    M, N = cfg.M, cfg.N
    s = np.zeros((N, M), dtype=complex)
    for pq, h in zip(alloc.p, channels):
        if h.blocks.shape != (N, M) or pq.shape != (N,):
            raise ValueError("allocation and channel dimensions do not match the config")
        s += pq[:, None] * h.blocks.conj()
    s = np.sqrt(alloc.E / M) * s.ravel() / np.sqrt(M)
    if clip:
        norm = np.linalg.norm(s)
        if norm > 0:
            s *= min(1.0, np.sqrt(cfg.P) / norm)
    return s
