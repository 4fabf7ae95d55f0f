"""Level sizes of the open book and the discrete open book over a range of windows.

Prints one row per scale: |sigma_N(D)|, |sigma_N(B)|, the bonding shapes, and
the first window level where the cardinality obstruction separates them.
"""

import argparse
import time
from fractions import Fraction

from coarsesigma.dirseq import cardinality_obstruction
from coarsesigma.rips import TruncationParams
from coarsesigma.sigma import ind_sigma, sigma_stability
from coarsesigma.space import discrete_open_book, open_book


def shape(bonding) -> str:
    if all(bonding(x) == x for x in bonding.domain) and bonding.is_injective():
        return "identity" if bonding.is_surjective() else "inclusion"
    return "bijection" if bonding.is_bijective() else "other"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rays", type=int, default=12)
    parser.add_argument("--top", type=int, default=14, help="largest scale N")
    parser.add_argument("--spacing", default="1/2", help="net spacing of the open book")
    args = parser.parse_args()

    radius = 8 * (args.top + 1)
    t0 = time.perf_counter()
    d = ind_sigma(discrete_open_book(args.rays), (1, args.top), TruncationParams(radius))
    b = ind_sigma(open_book(args.rays, Fraction(args.spacing)), (1, args.top), TruncationParams(radius))
    print(f"k={args.rays} rays, R={radius}, computed in {time.perf_counter() - t0:.1f}s")
    print(f"{'N':>3} {'|D|':>4} {'|B|':>4}  D bonding   B bonding")
    for n in range(1, args.top + 1):
        bd = shape(d.bondings[n]) if n in d.bondings else "-"
        bb = shape(b.bondings[n]) if n in b.bondings else "-"
        print(f"{n:>3} {len(d.levels[n]):>4} {len(b.levels[n]):>4}  {bd:<11} {bb}")
    for name, window in (("D", d), ("B", b)):
        print(f"{name}: {sigma_stability(window).to_json()['verdict']}")
    verdict = cardinality_obstruction(b.to_direct_sequence(True), d.to_direct_sequence(True))
    print(f"obstruction B vs D on the window: {verdict.verdict}"
          + (f" (level {verdict.level})" if verdict.level is not None else ""))


if __name__ == "__main__":
    main()
