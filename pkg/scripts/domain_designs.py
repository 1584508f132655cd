"""GD designs (n=50, p=5) in the disc, three-quarter disc and diamond domains."""

import argparse
from pathlib import Path

from doptdesign.basis import build_index_set
from doptdesign.experiments import random_feasible_objective, run_domain_demo
from doptdesign.objective import objective_value


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--degree", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/domains")
    args = ap.parse_args()
    s = build_index_set(2, args.degree)
    for name in ("circle", "three_quarters", "diamond"):
        X = run_domain_demo(name, args.n, args.degree, args.seed, Path(args.out) / f"{name}.csv")
        rand = min(random_feasible_objective(name, args.n, args.degree, k) for k in range(20))
        print(f"{name:15s} W(gd) {objective_value(X, s):8.2f}   best of 20 random {rand:8.2f}")


if __name__ == "__main__":
    main()
