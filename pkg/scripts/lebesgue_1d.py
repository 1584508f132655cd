"""1-D Lebesgue constants for p = 1..9: GD and LHS designs against Chebyshev roots."""

import argparse
from pathlib import Path

from doptdesign.experiments import lebesgue_csvs, run_lebesgue_sweep, write_atomic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pmax", type=int, default=9)
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--ntest", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/lebesgue_1d")
    args = ap.parse_args()
    sizes = range(2, args.pmax + 2)
    gd = run_lebesgue_sweep(sizes, "gd", repetitions=args.reps, n_test=args.ntest, seed=args.seed)
    lhs = run_lebesgue_sweep(sizes, "lhs", repetitions=args.reps, n_test=args.ntest,
                             seed=args.seed, reference=False)
    sweep = {k: gd[k] + lhs[k] for k in ("records", "aggregates")}
    records, summary = lebesgue_csvs(sweep)
    write_atomic(Path(args.out) / "lebesgue_records.csv", records)
    write_atomic(Path(args.out) / "lebesgue_summary.csv", summary)
    for row in sorted(sweep["aggregates"], key=lambda a: (a["l"], a["sampler"])):
        print(f"p={row['l'] - 1} {row['sampler']:16s} median {row['median']:.4f}")


if __name__ == "__main__":
    main()
