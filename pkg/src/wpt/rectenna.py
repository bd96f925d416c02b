"""Fourth-order truncated diode model of the rectenna output voltage.

The DC output is ``beta2 * LPF(y^2) + beta4 * LPF(y^4)`` where ``y`` is the
received multi-sine. In vector form it depends on the waveform only through
the autocorrelation ``t_k = sum_n e_n^* e_{n+k}`` of the per-tone received
amplitudes ``e_n = h_n^T s_n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .channel import ChannelState
from .config import SystemConfig


@dataclass(frozen=True)
class RectennaParams:
    r_ant: float = 50.0
    ideality_n: float = 1.0
    # room temperature (300 K)
    v_t: float = 25.85e-3

    def __post_init__(self):
        if not (self.r_ant > 0 and self.ideality_n > 0 and self.v_t > 0):
            raise ValueError("rectenna parameters must be positive")

    @property
    def beta2(self) -> float:
        return self.r_ant / (2 * self.ideality_n * self.v_t)

    @property
    def beta4(self) -> float:
        return self.r_ant**2 / (24 * self.ideality_n**3 * self.v_t**3)

    @classmethod
    def from_dict(cls, data: dict) -> "RectennaParams":
        keys = {"r_ant_ohm": "r_ant", "ideality_n": "ideality_n", "v_t_volts": "v_t"}
        unknown = set(data) - set(keys)
        if unknown:
            raise ValueError(f"unknown rectenna keys: {sorted(unknown)}")
        return cls(**{keys[k]: float(v) for k, v in data.items()})

    def to_dict(self) -> dict:
        return {"r_ant_ohm": self.r_ant, "ideality_n": self.ideality_n, "v_t_volts": self.v_t}


def _as_channel(h):
    if isinstance(h, ChannelState):
        return h
    raise TypeError("expected a ChannelState")


def tone_projections(h: ChannelState, s) -> np.ndarray:
    """Received complex amplitude at each tone, ``e_n = h_n^T s_n``."""
    h = _as_channel(h)
    s = np.asarray(s, dtype=complex)
    if s.shape != h.h.shape:
        raise ValueError(f"waveform length {s.size} does not match channel length {h.h.size}")
    return np.einsum("nm,nm->n", h.blocks, s.reshape(h.N, h.M))


def autocorrelation(e) -> np.ndarray:
    """t_k = sum_n conj(e_n) e_{n+k} for k = 0..N-1; t_0 is returned real-valued in a complex array."""
    e = np.asarray(e, dtype=complex)
    N = e.size
    t = np.empty(N, dtype=complex)
    for k in range(N):
        t[k] = np.vdot(e[: N - k], e[k:])
    t[0] = t[0].real
    return t


def epigraph_vars(h: ChannelState, s) -> np.ndarray:
    """t_{q,k} = s^H M_{q,k} s, computed from the tone projections."""
    return autocorrelation(tone_projections(h, s))


def vout_from_t(t, params: RectennaParams, beta2: float | None = None, beta4: float | None = None) -> float:
    b2 = params.beta2 if beta2 is None else beta2
    b4 = params.beta4 if beta4 is None else beta4
    t0 = t[0].real
    return float(b2 * t0 + 1.5 * b4 * t0**2 + 3 * b4 * np.sum(np.abs(t[1:]) ** 2))


def vout_terms(h: ChannelState, s, params: RectennaParams) -> tuple[float, float, float]:
    """The linear, 4th-order diagonal and 4th-order off-diagonal contributions."""
    t = epigraph_vars(h, s)
    t0 = t[0].real
    return (params.beta2 * t0, 1.5 * params.beta4 * t0**2,
            3 * params.beta4 * float(np.sum(np.abs(t[1:]) ** 2)))


def vout(h: ChannelState, s, params: RectennaParams) -> float:
    return vout_from_t(epigraph_vars(h, s), params)


def weighted_sum_vout(channels, s, weights, params: RectennaParams) -> float:
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(channels),):
        raise ValueError(f"{weights.size} weights for {len(channels)} users")
    return float(sum(w * vout(h, s, params) for w, h in zip(weights, channels)))


def _harmonic_grid(f1: float, delta_f: float, N: int, max_den=10**6):
    """Integer harmonic indices of the tones relative to their common fundamental."""
    ratio = Fraction(f1 / delta_f).limit_denominator(max_den)
    if abs(float(ratio) * delta_f - f1) > 1e-9 * f1:
        raise ValueError("tone grid has no common period: f1/delta_f is not rational enough")
    a, b = ratio.numerator, ratio.denominator
    return np.array([a + n * b for n in range(N)], dtype=np.int64)


def vout_time_oracle(h: ChannelState, s, params: RectennaParams, cfg: SystemConfig,
                     samples_per_period: int | None = None) -> float:
    """DC output computed by sampling y(t) over one period of the tone grid.

    Independent of the autocorrelation path: only the per-tone received
    amplitudes are shared. Time averages over one common period are exact
    for every harmonic below half the sample count.
    """
    h = _as_channel(h)
    e = tone_projections(h, s)
    k = _harmonic_grid(cfg.f1, cfg.delta_f, h.N)
    # y^4 carries harmonics up to 4*k_max; require rate > 8 f_N
    min_samples = 8 * int(k.max()) + 1
    L = min_samples if samples_per_period is None else int(samples_per_period)
    if L < min_samples:
        raise ValueError(f"need more than {min_samples - 1} samples per period, got {L}")
    i = np.arange(L, dtype=np.int64)
    y = np.zeros(L)
    for e_n, k_n in zip(e, k):
        # exact integer phase index keeps large carrier frequencies accurate
        ph = 2 * np.pi * ((k_n * i) % L) / L
        y += np.sqrt(2) * (e_n.real * np.cos(ph) - e_n.imag * np.sin(ph))
    y2 = y * y
    return float(params.beta2 * y2.mean() + params.beta4 * (y2 * y2).mean())
