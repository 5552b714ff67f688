"""Median bound-to-functional ratio on random instances, tightest first."""

import argparse
from collections import defaultdict

import numpy as np

from chebbounds.bounds import BallEnclosure, compare_all


def random_instance(rng, n, d):
    p = rng.dirichlet(np.ones(n))
    x, y = rng.normal(size=(n, d)), rng.normal(size=(n, d))
    ex = BallEnclosure(*_endpoints(x))
    ey = BallEnclosure(*_endpoints(y))
    return p, x, y, ex, ey


def _endpoints(v):
    # ball about the mean just large enough to hold every point
    c = v.mean(axis=0)
    r = np.linalg.norm(v - c, axis=1).max()
    e = np.zeros_like(c)
    e[0] = r
    return c - e, c + e


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--p", type=float, default=2.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    looseness = defaultdict(list)
    for _ in range(args.instances):
        for r in compare_all(*random_instance(rng, args.n, args.dim), exponent=args.p):
            if r.value is not None and r.functional > 0:
                looseness[(r.theorem, r.branch)].append(r.value / r.functional)

    rows = sorted((np.median(v), k) for k, v in looseness.items())
    print(f"{'bound':8} {'branch':8} {'median bound/|T|':>18}")
    for med, (theorem, branch) in rows:
        print(f"{theorem:8} {branch:8} {med:18.4f}")


if __name__ == "__main__":
    main()
