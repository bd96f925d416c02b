"""Average output voltage versus number of tones for several antenna counts.

Writes the raw rows to results/tone_sweep.csv and prints, per (M, N), the mean
voltage of each scheme and the mean per-realization SCA/ASS ratio.

    python scripts/tone_sweep.py [--realizations 100] [--threads 1] [--seed S]
"""
import argparse
from collections import defaultdict
from pathlib import Path

import numpy as np

from wpt.harness import ExperimentSpec, emit_csv, run_experiment, summarize

HERE = Path(__file__).parent


def sca_ass_ratios(rows):
    by = defaultdict(dict)
    for r in rows:
        by[(r.M, r.N, r.real)][r.scheme] = r.vout[0]
    out = defaultdict(list)
    for (M, N, _), v in by.items():
        out[(M, N)].append(v["sca"] / v["ass"])
    return {k: float(np.mean(x)) for k, x in sorted(out.items())}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--spec", default=HERE / "specs" / "tone_sweep.json")
    ap.add_argument("--realizations", type=int)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", default=HERE.parent / "results" / "tone_sweep.csv")
    args = ap.parse_args()

    spec = ExperimentSpec.from_json(args.spec)
    if args.realizations:
        spec.realizations = args.realizations
    rows = run_experiment(spec, seed=args.seed, threads=args.threads)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    emit_csv(rows, args.out)

    means = {(s["scheme"], s["M"], s["N"]): s["mean"] for s in summarize(rows)}
    ratios = sca_ass_ratios(rows)
    print(f"{'M':>3} {'N':>3} " + " ".join(f"{s:>11}" for s in spec.schemes) + "   sca/ass")
    for M, N in ratios:
        print(f"{M:>3} {N:>3} " + " ".join(f"{means[(s, M, N)]:11.4e}" for s in spec.schemes)
              + f"   {ratios[(M, N)]:.4f}")
    flagged = sum(not r.converged for r in rows)
    print(f"{len(rows)} rows -> {args.out}; {flagged} solver runs hit max_iters")


if __name__ == "__main__":
    main()
