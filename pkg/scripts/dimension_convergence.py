"""Pressure-bracket convergence for a list of alphabets.

For each alphabet, doubles the word length until the dimension bracket
is narrower than --width (or the length cap is hit) and prints the
schedule; per-alphabet CSVs go next to --out-prefix when given.

    python3 scripts/dimension_convergence.py --alphabets 1,2 1,2,3 1,2,3,4
"""

import argparse
import sys

from zaremba.cf import Alphabet
from zaremba.dimension import convergence_table


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alphabets", nargs="+", default=["1,2", "1,2,3,4"])
    parser.add_argument("--width", type=float, default=0.02)
    parser.add_argument("--n-max", type=int, default=32)
    parser.add_argument("--out-prefix", default=None,
                        help="write <prefix><label>.csv per alphabet")
    args = parser.parse_args()

    for text in args.alphabets:
        alphabet = Alphabet.parse(text)
        label = alphabet.label().replace(",", "")
        print("alphabet {%s}: target width %g" % (alphabet.label(), args.width))
        print("%6s %14s %14s %12s %10s" % ("n", "s_lower", "s_upper",
                                           "width", "seconds"))
        rows = convergence_table(alphabet, args.width, args.n_max)
        for n, s_lower, s_upper, width, wall in rows:
            print("%6d %14.10f %14.10f %12.10f %10.2f"
                  % (n, s_lower, s_upper, width, wall))
        n, s_lower, s_upper, width, _ = rows[-1]
        print("  midpoint %.10f, %s" % (
            0.5 * (s_lower + s_upper),
            "converged" if width <= args.width else "NOT converged at n=%d" % n))
        if args.out_prefix:
            path = "%s%s.csv" % (args.out_prefix, label)
            with open(path, "w") as fh:
                fh.write("n,s_lower,s_upper,width,wall_time\n")
                for row in rows:
                    fh.write("%d,%.12f,%.12f,%.12f,%.3f\n" % row)
            print("  table written to %s" % path, file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
