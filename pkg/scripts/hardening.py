"""Gap between the SCA waveform and the lifted large-M allocation as M grows.

    python scripts/hardening.py [--N 8] [--M 4 20 50] [--realizations 100] [--model iid]
"""
import argparse

import numpy as np

from wpt import RectennaParams, SystemConfig
from wpt.asymptotic import lift_to_waveform, sa_solve
from wpt.channel import generate_channels
from wpt.rectenna import vout
from wpt.sca import sca_solve


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=8)
    ap.add_argument("--M", type=int, nargs="+", default=[4, 20, 50])
    ap.add_argument("--realizations", type=int, default=100)
    ap.add_argument("--model", choices=("iid", "tdl"), default="iid")
    ap.add_argument("--seed", type=int, default=606)
    args = ap.parse_args()

    params = RectennaParams()
    print(f"{'M':>4} {'mean |gap|/v_sca':>18} {'stderr':>9} {'lift power / P':>15}")
    for M in args.M:
        cfg = SystemConfig(M=M, N=args.N, P=3.9811 / M, seed=args.seed)
        alloc, _ = sa_solve(cfg, cfg.lambdas, [1.0], params)
        gaps, power = [], []
        for r in range(args.realizations):
            h = generate_channels(cfg, r, args.model)
            s, _ = sca_solve(h, [1.0], cfg, params)
            raw = lift_to_waveform(alloc, h, cfg, clip=False)
            lifted = lift_to_waveform(alloc, h, cfg)
            v = vout(h[0], s, params)
            gaps.append(abs(v - vout(h[0], lifted, params)) / v)
            power.append(np.vdot(raw, raw).real / cfg.P)
        g = np.asarray(gaps)
        print(f"{M:>4} {g.mean():18.4f} {g.std(ddof=1) / np.sqrt(g.size):9.4f} {np.mean(power):15.4f}")


if __name__ == "__main__":
    main()
