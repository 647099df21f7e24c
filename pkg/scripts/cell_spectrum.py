"""Exponential-sum mass across Dirichlet cells.

Builds (or loads) a census, draws random frequencies, decomposes each
into its ladder cell, and prints per-cell counts, sigma contributions,
and the damping ratio sigma * (Q_alpha Q_beta)^c / (|Omega| sqrt |Z|).

    python3 scripts/cell_spectrum.py --alphabet 1,2,3,4 --n 100000 --z-size 200
"""

import argparse
import random
import sys

from zaremba.census import CensusConfig, enumerate_denominators, load_census
from zaremba.cf import Alphabet
from zaremba.freq import (CellIndex, ScaleSequence, bound_diagnostic,
                          cell_report, sigma_nz)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alphabet", default="1,2,3,4")
    parser.add_argument("--n", type=int, default=10 ** 5)
    parser.add_argument("--census", default=None,
                        help="saved census file; skips enumeration")
    parser.add_argument("--q1", type=int, default=4)
    parser.add_argument("--z-size", type=int, default=200)
    parser.add_argument("--c", type=float, default=0.25,
                        help="damping exponent in the cell ratio")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=8)
    args = parser.parse_args()

    if args.census:
        census = load_census(args.census)
    else:
        census = enumerate_denominators(CensusConfig(
            alphabet=Alphabet.parse(args.alphabet), n_limit=args.n,
            thread_count=args.threads))
    hist = census.multiplicity
    n_limit = census.n_limit
    scale = ScaleSequence(args.q1)

    rng = random.Random(args.seed)
    thetas = [rng.random() for _ in range(args.z_size)]
    total = sigma_nz(thetas, hist)
    mass = hist.total()
    print("census N=%d, multiplicity window [%d, %d], mass %d"
          % (n_limit, hist.lo, hist.hi, mass))
    print("sigma over %d frequencies: %.6g (triangle bound %.6g)"
          % (len(thetas), total, float(len(thetas)) * mass))

    rows = cell_report(thetas, hist, n_limit, scale)
    print("%6s %6s %8s %14s %12s" % ("alpha", "beta", "count",
                                     "sigma_part", "ratio"))
    for row in rows:
        ratio = bound_diagnostic(row.sigma_part, mass, row.count,
                                 CellIndex(row.alpha, row.beta),
                                 args.c, scale)
        print("%6d %6d %8d %14.6g %12.4g"
              % (row.alpha, row.beta, row.count, row.sigma_part, ratio))
    share = sum(r.sigma_part for r in rows)
    print("cells: %d, sigma accounted: %.6g" % (len(rows), share))
    return 0


if __name__ == "__main__":
    sys.exit(main())
