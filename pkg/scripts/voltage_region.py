"""Two-user voltage region: weight sweeps of both solvers and their TDMA counterparts.

    python scripts/voltage_region.py [--realizations 50] [--seed S]
"""
import argparse
from pathlib import Path

from wpt.harness import ExperimentSpec, _write, region_to_csv, run_region

HERE = Path(__file__).parent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--spec", default=HERE / "specs" / "region.json")
    ap.add_argument("--realizations", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", default=HERE.parent / "results" / "region.csv")
    args = ap.parse_args()

    spec = ExperimentSpec.from_json(args.spec)
    if args.realizations:
        spec.realizations = args.realizations
    pts = run_region(spec, seed=args.seed)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    _write(args.out, region_to_csv(pts))
    for p in pts:
        label = f"w=({p.w1:.3f},{p.w2:.3f})" if p.tau is None else f"tau={p.tau:.2f}"
        print(f"{p.scheme:>9} {label:>18}  v1={p.v1:.4e}  v2={p.v2:.4e}")


if __name__ == "__main__":
    main()
