"""Best ratio |T| / bound reached by random search, per bound branch and length n.

    python3 scripts/sharpness_survey.py --trials 2000 --n 2 3 5 8
"""

import argparse

from chebbounds.bounds import THEOREM_BRANCHES
from chebbounds.extremal import SearchConfig, random_search


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3, 5])
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--p", type=float, default=2.0)
    args = ap.parse_args()

    print(f"{'bound':6} {'branch':8} " + " ".join(f"{'n=' + str(n):>10}" for n in args.n))
    for bound, branches in THEOREM_BRANCHES.items():
        for branch in branches:
            cells = []
            for n in args.n:
                cfg = SearchConfig(bound, branch, n=n, dim=args.dim, trials=args.trials, seed=args.seed, exponent=args.p)
                cells.append(f"{random_search(cfg).best_ratio:10.6f}")
            print(f"{bound:6} {branch:8} " + " ".join(cells))


if __name__ == "__main__":
    main()
