"""Frequency-selective multi-antenna channel realizations.

Channels are stored as one ``ChannelState`` per user: a complex vector of
length M*N laid out as N contiguous blocks of M spatial gains (block n holds
the gains at tone n).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .config import SystemConfig


@dataclass(frozen=True)
class ChannelState:
    h: np.ndarray
    lam: float
    M: int
    N: int

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        if h.shape != (self.M * self.N,):
            raise ValueError(f"h must have length M*N={self.M * self.N}, got shape {h.shape}")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def blocks(self) -> np.ndarray:
        """(N, M) view: row n is the spatial channel at tone n."""
        return self.h.reshape(self.N, self.M)

    @classmethod
    def from_blocks(cls, blocks, lam: float = 1.0) -> "ChannelState":
        blocks = np.atleast_2d(np.asarray(blocks, dtype=complex))
        N, M = blocks.shape
        return cls(blocks.ravel(), float(lam), M, N)


@dataclass(frozen=True)
class PowerDelayProfile:
    tap_delays: np.ndarray
    tap_powers: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.tap_delays, dtype=float).ravel()
        p = np.asarray(self.tap_powers, dtype=float).ravel()
        if d.size == 0:
            raise ValueError("power delay profile needs at least one tap")
        if d.shape != p.shape:
            raise ValueError("tap_delays and tap_powers must have the same length")
        if np.any(d < 0) or np.any(np.diff(d) <= 0):
            raise ValueError("tap delays must be nonnegative and strictly increasing")
        if np.any(p < 0):
            raise ValueError("tap powers must be nonnegative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"tap powers must sum to 1 (got {p.sum():.15g})")
        object.__setattr__(self, "tap_delays", d)
        object.__setattr__(self, "tap_powers", p)

    @classmethod
    def normalized(cls, delays, powers) -> "PowerDelayProfile":
        p = np.asarray(powers, dtype=float)
        return cls(np.asarray(delays, dtype=float), p / p.sum())

    @classmethod
    def from_json(cls, path) -> "PowerDelayProfile":
        """Load ``{"delays_ns": [...], "powers_db": [...]}``; powers are normalized."""
        data = json.loads(Path(path).read_text())
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "PowerDelayProfile":
        unknown = set(data) - {"delays_ns", "powers_db"}
        if unknown:
            raise ValueError(f"unknown PDP keys: {sorted(unknown)}")
        delays = np.asarray(data["delays_ns"], dtype=float) * 1e-9
        powers = 10.0 ** (np.asarray(data["powers_db"], dtype=float) / 10.0)
        if delays.size == 0:
            raise ValueError("power delay profile needs at least one tap")
        return cls.normalized(delays, powers)

    @property
    def rms_delay_spread(self) -> float:
        mean = np.dot(self.tap_powers, self.tap_delays)
        return float(np.sqrt(np.dot(self.tap_powers, (self.tap_delays - mean) ** 2)))

    def frequency_correlation(self, df: float) -> complex:
        """E[H(f) H*(f+df)] for unit-power taps."""
        return complex(np.sum(self.tap_powers * np.exp(2j * np.pi * df * self.tap_delays)))


def exponential_pdp(n_taps=18, rms_delay_spread=140e-9, tap_spacing=60e-9) -> PowerDelayProfile:
    """Exponentially decaying profile on a uniform delay grid, with the decay
    constant solved so the RMS delay spread matches."""
    delays = tap_spacing * np.arange(n_taps)

    def spread(decay):
        return PowerDelayProfile.normalized(delays, np.exp(-delays / decay)).rms_delay_spread

    upper = 1e3 * delays[-1]
    if not spread(1e-3 * tap_spacing) < rms_delay_spread < spread(upper):
        raise ValueError("requested RMS delay spread not reachable with this tap grid")
    decay = brentq(lambda d: spread(d) - rms_delay_spread, 1e-3 * tap_spacing, upper, xtol=1e-18)
    return PowerDelayProfile.normalized(delays, np.exp(-delays / decay))


# Stand-in for a large open indoor space (18 taps, 140 ns RMS delay spread).
DEFAULT_PDP = exponential_pdp()


def substream(seed: int, q: int, realization: int = 0) -> np.random.Generator:
    """Independent generator for one (seed, user, realization) triple."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(realization), int(q)]))


def _cscg(rng, shape, var=1.0):
    return np.sqrt(var / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def generate_channel_tdl(cfg: SystemConfig, pdp: PowerDelayProfile, q: int, rng) -> ChannelState:
    """Tapped-delay-line channel for user q, independent taps per antenna."""
    if not isinstance(pdp, PowerDelayProfile):
        raise TypeError("pdp must be a PowerDelayProfile")
    lam = float(cfg.lambdas[q])
    g = _cscg(rng, (cfg.M, pdp.tap_delays.size)) * np.sqrt(pdp.tap_powers)
    # (N, L) steering of each tap at each tone
    phase = np.exp(-2j * np.pi * np.outer(cfg.freqs, pdp.tap_delays))
    blocks = np.sqrt(lam) * (phase @ g.T)
    return ChannelState(blocks.ravel(), lam, cfg.M, cfg.N)


def generate_channel_iid(cfg: SystemConfig, q: int, rng) -> ChannelState:
    lam = float(cfg.lambdas[q])
    return ChannelState(_cscg(rng, cfg.M * cfg.N, lam), lam, cfg.M, cfg.N)


def generate_channels(cfg: SystemConfig, realization: int = 0, model: str = "tdl",
                      pdp: PowerDelayProfile | None = None, seed: int | None = None) -> list[ChannelState]:
    """All K users for one realization, each from its own substream."""
    seed = cfg.seed if seed is None else seed
    out = []
    for q in range(cfg.K):
        rng = substream(seed, q, realization)
        if model == "tdl":
            out.append(generate_channel_tdl(cfg, DEFAULT_PDP if pdp is None else pdp, q, rng))
        elif model == "iid":
            out.append(generate_channel_iid(cfg, q, rng))
        else:
            raise ValueError(f"unknown channel model {model!r}")
    return out
