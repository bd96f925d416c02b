"""System configuration shared by the channel generator, solvers and harness."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

# EIRP of 36 dBm expressed as the product P*M in watts.
EIRP_WATTS = 3.9811
CENTER_FREQ_HZ = 5.18e9
BANDWIDTH_HZ = 10e6
PATH_LOSS_DB = 61.0


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SystemConfig:
    """Dimensions, power budget, tone grid and solver tolerances.

    ``P`` defaults to ``EIRP_WATTS / M`` (fixed EIRP). ``f1``/``delta_f``
    default to N tones of spacing ``bandwidth/N`` centred on ``center_freq``.
    ``weights`` and ``path_loss_db`` accept a scalar (broadcast to all users).
    """

    M: int = 4
    N: int = 8
    K: int = 1
    P: float | None = None
    f1: float | None = None
    delta_f: float | None = None
    weights: tuple[float, ...] | float = 1.0
    path_loss_db: tuple[float, ...] | float = PATH_LOSS_DB
    epsilon: float = 1e-5
    max_iters: int = 200
    seed: int = 0
    center_freq: float = CENTER_FREQ_HZ
    bandwidth: float = BANDWIDTH_HZ

    def __post_init__(self):
        for name in ("M", "N", "K", "max_iters"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if self.P is None:
            object.__setattr__(self, "P", EIRP_WATTS / self.M)
        if self.delta_f is None:
            object.__setattr__(self, "delta_f", self.bandwidth / self.N)
        if self.f1 is None:
            object.__setattr__(self, "f1", self.center_freq - (self.N - 1) * self.delta_f / 2)
        object.__setattr__(self, "weights", _per_user(self.weights, self.K, "weights"))
        object.__setattr__(self, "path_loss_db", _per_user(self.path_loss_db, self.K, "path_loss_db"))

        if not self.P > 0:
            raise ConfigError("P must be > 0")
        if not self.delta_f > 0:
            raise ConfigError("delta_f must be > 0")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be > 0")
        w = np.asarray(self.weights)
        if np.any(w < 0) or not np.any(w > 0):
            raise ConfigError("weights must be nonnegative with at least one positive entry")
        if not self.f1 > (self.N - 1) * self.delta_f / 2:
            raise ConfigError("tone grid requires f1 > (N-1)*delta_f/2")

    @property
    def lambdas(self) -> np.ndarray:
        """Linear large-scale power gains, one per user."""
        return 10.0 ** (-np.asarray(self.path_loss_db, dtype=float) / 10.0)

    @property
    def freqs(self) -> np.ndarray:
        return self.f1 + self.delta_f * np.arange(self.N)

    @property
    def E(self) -> float:
        return self.P * self.M

    def with_(self, **changes) -> "SystemConfig":
        """Copy with changes. Changing N (or the band) re-derives the tone grid
        unless ``f1``/``delta_f`` are given; P is kept unless given."""
        if any(k in changes for k in ("N", "bandwidth", "center_freq")):
            changes.setdefault("f1", None)
            changes.setdefault("delta_f", None)
        if "K" in changes and changes["K"] != self.K:
            changes.setdefault("weights", _shrink(self.weights, changes["K"]))
            changes.setdefault("path_loss_db", _shrink(self.path_loss_db, changes["K"]))
        return replace(self, **changes)


def _per_user(value, K, name):
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1:
        arr = np.repeat(arr, K)
    if arr.shape != (K,):
        raise ConfigError(f"{name} must have one entry per user (K={K}), got {arr.size}")
    return tuple(float(x) for x in arr)


def _shrink(values, K):
    vals = tuple(values)
    return vals[0] if len(set(vals)) == 1 else vals[:K]
