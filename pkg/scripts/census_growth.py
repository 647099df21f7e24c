"""Growth of the denominator census across scales.

Runs the census for one alphabet over a doubling ladder of limits up to
--n-max, reports cardinality, proportion, and the mean multiplicity at
each rung, then fits the multiplicity exponent on the ladder.  A CSV of
the rungs goes to --out when given.

    python3 scripts/census_growth.py --alphabet 1,2,3,4 --n-max 100000
"""

import argparse
import sys
import time

from zaremba.census import (CensusConfig, enumerate_denominators,
                            multiplicity_exponent, proportion)
from zaremba.cf import Alphabet


def ladder(n_max: int, rungs: int):
    out = [n_max]
    while len(out) < rungs and out[-1] // 2 >= 1000:
        out.append(out[-1] // 2)
    return out[::-1]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alphabet", default="1,2,3,4")
    parser.add_argument("--n-max", type=int, default=10 ** 5)
    parser.add_argument("--rungs", type=int, default=4)
    parser.add_argument("--threads", type=int, default=8)
    parser.add_argument("--out", default=None, help="CSV path for the rungs")
    args = parser.parse_args()

    alphabet = Alphabet.parse(args.alphabet)
    results = []
    print("alphabet {%s}" % alphabet.label())
    print("%10s %10s %12s %12s %10s" % ("N", "|D(N)|", "proportion",
                                        "mean mult", "seconds"))
    for n in ladder(args.n_max, args.rungs):
        start = time.perf_counter()
        census = enumerate_denominators(CensusConfig(
            alphabet=alphabet, n_limit=n, thread_count=args.threads))
        elapsed = time.perf_counter() - start
        results.append(census)
        print("%10d %10d %12.6f %12.2f %10.2f"
              % (n, census.member_count(), proportion(census),
                 census.multiplicity.mean_multiplicity(), elapsed))

    if len(results) >= 2:
        fit = multiplicity_exponent(results)
        print("multiplicity exponent: %.6f (intercept %.4f)"
              % (fit.slope, fit.intercept))
        print("per-rung residuals:", ["%.4f" % r for r in fit.residuals])

    if args.out:
        with open(args.out, "w") as fh:
            fh.write("n_limit,member_count,proportion,mean_multiplicity\n")
            for census in results:
                fh.write("%d,%d,%.10f,%.10f\n"
                         % (census.n_limit, census.member_count(),
                            proportion(census),
                            census.multiplicity.mean_multiplicity()))
        print("rungs written to %s" % args.out, file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
