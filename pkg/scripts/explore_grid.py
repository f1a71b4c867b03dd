"""Enumerate exact rules on node subsets of a candidate grid.

Example:
    python scripts/explore_grid.py -m 3 --mode positive
    python scripts/explore_grid.py --candidates 1/8,3/8,5/8,7/8 -m 2
"""

import argparse
from fractions import Fraction

from exactdisc.corpus import build_X2
from exactdisc.discretize import search_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--candidates", default="-1/2,1/8,3/8,5/8,7/8")
    ap.add_argument("-m", type=int, default=3, help="subset size")
    ap.add_argument("--mode", choices=("signed", "positive"), default="signed")
    ap.add_argument("--max-subsets", type=int, default=None)
    args = ap.parse_args()

    cands = [Fraction(tok) for tok in args.candidates.split(",")]
    rules = search_grid(build_X2(), cands, args.m, mode=args.mode,
                        max_subsets=args.max_subsets)
    print(f"{len(rules)} exact {args.mode} rule(s) on {args.m}-subsets of {len(cands)} candidates")
    for r in rules:
        print("  " + "; ".join(f"{x} -> {w}" for x, w in zip(r.nodes, r.weights)))


if __name__ == "__main__":
    main()
