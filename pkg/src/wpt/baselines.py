"""Reference waveforms and two-user voltage regions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .asymptotic import lift_to_waveform, sa_solve
from .channel import ChannelState
from .config import SystemConfig
from .rectenna import RectennaParams, vout
from .sca import sca_solve


@dataclass(frozen=True)
class RegionPoint:
    v1: float
    v2: float
    w1: float | None
    w2: float | None
    scheme: str
    tau: float | None = None

    def __post_init__(self):
        if self.v1 < 0 or self.v2 < 0:
            raise ValueError("region voltages must be nonnegative")

    def row(self) -> dict:
        return {"scheme": self.scheme, "w1": self.w1, "w2": self.w2,
                "tau": self.tau, "v1": self.v1, "v2": self.v2}


def ass_waveform(h: ChannelState, P: float) -> np.ndarray:
    """All power, matched-beamformed, on the strongest tone (lowest index on ties)."""
    norms = np.linalg.norm(h.blocks, axis=1)
    if not np.any(norms > 0):
        raise ValueError("all-zero channel has no strongest tone")
    n = int(np.argmax(norms))
    s = np.zeros((h.N, h.M), dtype=complex)
    s[n] = np.sqrt(P) * h.blocks[n].conj() / norms[n]
    return s.ravel()


def uniform_matched_waveform(h: ChannelState, P: float) -> np.ndarray:
    """Matched beamforming on every tone with equal power; zero tones are skipped."""
    norms = np.linalg.norm(h.blocks, axis=1)
    live = norms > 0
    if not np.any(live):
        raise ValueError("all-zero channel")
    s = np.zeros((h.N, h.M), dtype=complex)
    s[live] = h.blocks[live].conj() / norms[live, None]
    return np.sqrt(P / live.sum()) * s.ravel()


def default_weight_grid(steps: int = 10):
    """(cos^2, sin^2) pairs; rounded so the 45 degree point is an exact tie."""
    theta = np.linspace(0.0, np.pi / 2, steps + 1)
    return [(round(float(np.cos(a) ** 2), 12), round(float(np.sin(a) ** 2), 12)) for a in theta]


def tdma_region(per_user_waveforms, channels, params: RectennaParams, grid,
                scheme: str = "tdma", cross_slot: bool = False) -> list[RegionPoint]:
    """Time-shared operating points, averaged over realizations.

    ``per_user_waveforms[r][q]`` is user q's own optimal waveform in realization
    r and ``channels[r]`` the matching two-user channels. With ``cross_slot``
    each user also harvests during the other user's slot.
    """
    if any(len(c) != 2 for c in channels):
        raise ValueError("TDMA region needs exactly two users")
    own = np.zeros(2)
    cross = np.zeros(2)
    for wfs, chans in zip(per_user_waveforms, channels):
        for q in range(2):
            own[q] += vout(chans[q], wfs[q], params)
            cross[q] += vout(chans[q], wfs[1 - q], params)
    own /= len(channels)
    cross /= len(channels)
    pts = []
    for tau in grid:
        v1 = tau * own[0] + (1 - tau) * cross[0] * cross_slot
        v2 = (1 - tau) * own[1] + tau * cross[1] * cross_slot
        pts.append(RegionPoint(float(v1), float(v2), None, None, scheme, float(tau)))
    return pts


def solve_weighted(channels, weights, cfg: SystemConfig, params: RectennaParams, solver: str, **kw):
    """Waveform from the SCA solver ("sca") or the lifted large-M allocation ("sa")."""
    if solver == "sca":
        s, trace = sca_solve(channels, weights, cfg, params)
        return s, trace.iterations, trace.converged
    if solver == "sa":
        alloc, trace = sa_solve(cfg, [h.lam for h in channels], weights, params, **kw)
        return lift_to_waveform(alloc, channels, cfg), trace.iterations, trace.converged
    raise ValueError(f"unknown solver {solver!r}")


def weight_sweep_region(channels, weight_grid, solver: str, params: RectennaParams,
                        cfg: SystemConfig, **kw) -> list[RegionPoint]:
    """Average (v1, v2) per weight pair over the given two-user realizations."""
    if any(len(c) != 2 for c in channels):
        raise ValueError("weight sweep needs exactly two users")
    pts = []
    for w in weight_grid:
        v = np.zeros(2)
        for chans in channels:
            s, _, _ = solve_weighted(chans, w, cfg.with_(weights=tuple(w)), params, solver, **kw)
            v += [vout(chans[0], s, params), vout(chans[1], s, params)]
        v /= len(channels)
        pts.append(RegionPoint(float(v[0]), float(v[1]), float(w[0]), float(w[1]), solver))
    return pts
