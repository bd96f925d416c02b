"""Quick self-consistency checks behind ``wpt validate``."""
from __future__ import annotations

import numpy as np

from .channel import ChannelState
from .config import SystemConfig
from .rectenna import RectennaParams, vout, vout_time_oracle
from .sca import HermitianOperator, build_A1, min_eigenpair, solve_qcqp
from .rectenna import epigraph_vars


def _rand_c(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def oracle_equivalence(n_instances=100, seed=0, params=None) -> float:
    """Worst relative gap between vout and the time-domain oracle."""
    params = params or RectennaParams()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        M, N = int(rng.integers(1, 4)), int(rng.integers(1, 6))
        cfg = SystemConfig(M=M, N=N, f1=float(rng.integers(N, 4 * N)), delta_f=1.0, P=1.0)
        h = ChannelState(_rand_c(rng, M * N), 1.0, M, N)
        s = _rand_c(rng, M * N)
        s *= np.sqrt(cfg.P) / np.linalg.norm(s)
        a, b = vout(h, s, params), vout_time_oracle(h, s, params, cfg)
        worst = max(worst, abs(a - b) / abs(b))
    return worst


def operator_consistency(n_instances=20, seed=1, params=None) -> float:
    """Worst relative gap between the matrix-free A1 apply and its dense form."""
    params = params or RectennaParams()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        K, M, N = int(rng.integers(1, 3)), int(rng.integers(1, 4)), int(rng.integers(1, 5))
        chans = [ChannelState(_rand_c(rng, M * N), 1.0, M, N) for _ in range(K)]
        t = [epigraph_vars(h, _rand_c(rng, M * N)) for h in chans]
        op = build_A1(chans, rng.random(K), t, params)
        v = _rand_c(rng, M * N)
        D = op.to_dense()
        worst = max(worst, np.linalg.norm(op.apply(v) - D @ v) / np.linalg.norm(D @ v))
    return worst


def qcqp_consistency(n_instances=50, seed=2) -> float:
    """Worst gap between the closed-form QCQP objective and P*min(0, lambda_min)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        d = int(rng.integers(1, 9))
        X = _rand_c(rng, d, d)
        A = X + X.conj().T
        P = float(rng.uniform(0.5, 3.0))
        x, obj = solve_qcqp(HermitianOperator.from_matrix(A), P)
        ref = P * min(0.0, np.linalg.eigvalsh(A)[0])
        worst = max(worst, abs(obj - ref), abs(np.vdot(x, A @ x).real - ref))
    return worst


CHECKS = [
    ("vout matches time-domain oracle", oracle_equivalence, 1e-8),
    ("matrix-free A1 matches dense A1", operator_consistency, 1e-10),
    ("closed-form QCQP matches eigenvalue bound", qcqp_consistency, 1e-8),
]


def run_all(verbose=True) -> bool:
    ok = True
    for name, fn, tol in CHECKS:
        err = fn()
        passed = err <= tol
        ok &= passed
        if verbose:
            print(f"{'PASS' if passed else 'FAIL'}  {name}: max error {err:.3g} (tol {tol:g})")
    return ok
