"""Monte-Carlo experiment runner and result serialization."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .baselines import (RegionPoint, ass_waveform, default_weight_grid, solve_weighted,
                        tdma_region, uniform_matched_waveform, weight_sweep_region)
from .channel import DEFAULT_PDP, PowerDelayProfile, generate_channels
from .config import EIRP_WATTS, ConfigError, SystemConfig
from .rectenna import RectennaParams, vout

SCHEMES = ("sca", "sa", "ass", "uniform")
REGION_SCHEMES = ("sca", "sa", "sca_tdma", "sa_tdma")
CSV_HEADER = ["scheme", "M", "N", "K", "real", "seed", "user", "vout_volts", "iters", "ms"]
REGION_HEADER = ["scheme", "w1", "w2", "tau", "v1", "v2"]


class SpecError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    experiment_id: str = "experiment"
    sweep: dict = field(default_factory=lambda: {"N": [1, 2, 4, 8, 16]})
    realizations: int = 100
    schemes: list = field(default_factory=lambda: ["sca", "sa", "ass"])
    channel_model: str = "tdl"
    system: dict = field(default_factory=dict)
    rectenna: dict = field(default_factory=dict)
    pdp: dict | None = None
    fixed_eirp: bool = True
    eirp_watts: float = EIRP_WATTS
    record_timing: bool = False
    weight_grid: list | None = None
    tau_grid: list | None = None
    output: str | None = None

    def __post_init__(self):
        if int(self.realizations) != self.realizations or self.realizations < 1:
            raise SpecError("realizations must be a positive integer")
        if not isinstance(self.sweep, dict):
            raise SpecError("sweep must map a variable name to a list of values")
        for var, vals in self.sweep.items():
            if var not in ("M", "N"):
                raise SpecError(f"cannot sweep {var!r}; use M or N (weights are swept by `region`)")
            if not vals:
                raise SpecError(f"sweep values for {var} are empty")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise SpecError(f"sweep values for {var} must be strictly increasing")
        unknown = set(self.schemes) - set(SCHEMES) - set(REGION_SCHEMES)
        if unknown:
            raise SpecError(f"unknown schemes: {sorted(unknown)}")
        if self.channel_model not in ("tdl", "iid"):
            raise SpecError("channel_model must be 'tdl' or 'iid'")
        bad = set(self.system) - {f.name for f in fields(SystemConfig)}
        if bad:
            raise SpecError(f"unknown system keys: {sorted(bad)}")
        if not self.fixed_eirp and "P" not in self.system:
            raise SpecError("fixed_eirp=false requires system.P")
        try:
            self.base_config()
            self.rectenna_params()
            self.power_delay_profile()
        except (ConfigError, ValueError, TypeError) as exc:
            raise SpecError(str(exc)) from exc

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise SpecError(f"unknown spec keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read spec {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise SpecError("spec must be a JSON object")
        return cls.from_dict(data)

    def base_config(self) -> SystemConfig:
        return SystemConfig(**self.system)

    def rectenna_params(self) -> RectennaParams:
        return RectennaParams.from_dict(self.rectenna)

    def power_delay_profile(self) -> PowerDelayProfile:
        return DEFAULT_PDP if self.pdp is None else PowerDelayProfile.from_dict(self.pdp)

    def points(self) -> list[dict]:
        names = list(self.sweep)
        return [dict(zip(names, combo)) for combo in itertools.product(*(self.sweep[n] for n in names))]

    def config_at(self, point: dict) -> SystemConfig:
        cfg = self.base_config().with_(**point)
        if self.fixed_eirp:
            cfg = cfg.with_(P=self.eirp_watts / cfg.M)
        return cfg


@dataclass
class ResultRow:
    scheme: str
    M: int
    N: int
    K: int
    real: int
    seed: int
    vout: tuple
    iters: int
    ms: float | None = None
    converged: bool = True

    def __post_init__(self):
        if any(v < 0 for v in self.vout):
            raise ValueError("vout must be nonnegative")


def _run_one(spec: ExperimentSpec, point: dict, r: int, seed: int) -> list[ResultRow]:
    cfg = spec.config_at(point).with_(seed=seed)
    params = spec.rectenna_params()
    chans = generate_channels(cfg, r, spec.channel_model, spec.power_delay_profile())
    target = int(np.argmax(cfg.weights))
    rows = []
    for scheme in spec.schemes:
        if scheme not in SCHEMES:
            continue
        start = time.perf_counter()
        iters, ok = 0, True
        if scheme in ("sca", "sa"):
            s, iters, ok = solve_weighted(chans, cfg.weights, cfg, params, scheme)
        elif scheme == "ass":
            s = ass_waveform(chans[target], cfg.P)
        else:
            s = uniform_matched_waveform(chans[target], cfg.P)
        ms = (time.perf_counter() - start) * 1e3 if spec.record_timing else None
        v = tuple(vout(h, s, params) for h in chans)
        rows.append(ResultRow(scheme, cfg.M, cfg.N, cfg.K, r, seed, v, iters, ms, ok))
    return rows


def _task(args):
    spec, point, r, seed = args
    return _run_one(spec, point, r, seed)


def run_experiment(spec: ExperimentSpec, seed: int | None = None, threads: int = 1) -> list[ResultRow]:
    """Every scheme on every (sweep point, realization); rows in canonical order."""
    seed = spec.base_config().seed if seed is None else int(seed)
    points = spec.points()
    tasks = [(spec, pt, r, seed) for pt in points for r in range(spec.realizations)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * threads))))
    else:
        chunks = [_task(t) for t in tasks]
    rows = [row for chunk in chunks for row in chunk]
    return canonical_sort(rows, spec)


def canonical_sort(rows, spec: ExperimentSpec | None = None):
    order = {s: i for i, s in enumerate(spec.schemes if spec else SCHEMES)}
    return sorted(rows, key=lambda r: (r.M, r.N, r.K, r.real, order.get(r.scheme, len(order)), r.scheme))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        for q, v in enumerate(r.vout):
            w.writerow([r.scheme, r.M, r.N, r.K, r.real, r.seed, q, _fmt(v), r.iters, _fmt(r.ms)])
    return buf.getvalue()


def _write(path, text: str):
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def emit_csv(rows, path):
    _write(path, rows_to_csv(rows))


def rows_to_json(rows) -> str:
    # full precision so rows round-trip exactly
    out = []
    for r in rows:
        d = asdict(r)
        d["vout"] = [float(v) for v in r.vout]
        out.append(d)
    return json.dumps(out, indent=1)


def emit_json(rows, path):
    _write(path, rows_to_json(rows))


def load_json_rows(path) -> list[ResultRow]:
    data = json.loads(Path(path).read_text())
    return [ResultRow(**{**d, "vout": tuple(d["vout"])}) for d in data]


def summarize(rows, group_by=("scheme", "M", "N")) -> list[dict]:
    """Mean and standard error of vout per group and user."""
    groups: dict[tuple, list] = {}
    for r in rows:
        for q, v in enumerate(r.vout):
            key = tuple(getattr(r, g) for g in group_by) + (q,)
            groups.setdefault(key, []).append(v)
    out = []
    for key, vals in groups.items():
        x = np.asarray(vals, dtype=float)
        se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
        out.append({**dict(zip(group_by, key)), "user": key[-1], "count": int(x.size),
                    "mean": float(x.mean()), "stderr": se})
    return out


def run_region(spec: ExperimentSpec, seed: int | None = None) -> list[RegionPoint]:
    """Two-user voltage regions: weight sweeps for sca/sa, time sharing for *_tdma."""
    base = spec.config_at(spec.points()[0] if spec.sweep else {})
    if base.K != 2:
        raise SpecError("region experiments need K = 2")
    seed = base.seed if seed is None else int(seed)
    params = spec.rectenna_params()
    pdp = spec.power_delay_profile()
    grid = [tuple(w) for w in spec.weight_grid] if spec.weight_grid else default_weight_grid()
    taus = spec.tau_grid if spec.tau_grid else list(np.linspace(0.0, 1.0, 11))
    chans = [generate_channels(base, r, spec.channel_model, pdp, seed=seed) for r in range(spec.realizations)]
    pts = []
    for scheme in spec.schemes:
        if scheme in ("sca", "sa"):
            pts += weight_sweep_region(chans, grid, scheme, params, base)
        elif scheme in ("sca_tdma", "sa_tdma"):
            solver = scheme.split("_")[0]
            wfs = []
            for c in chans:
                wfs.append([solve_weighted(c, w, base.with_(weights=w), params, solver)[0]
                            for w in ((1.0, 0.0), (0.0, 1.0))])
            pts += tdma_region(wfs, chans, params, taus, scheme=scheme)
    return pts


def region_to_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REGION_HEADER)
    for p in points:
        w.writerow([p.scheme, _fmt(p.w1), _fmt(p.w2), _fmt(p.tau), _fmt(p.v1), _fmt(p.v2)])
    return buf.getvalue()
