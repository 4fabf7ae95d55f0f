"""Compare sigma levels against the path oracle on many random finite models."""

import argparse
import collections
import random
import time

from coarsesigma.examples import random_tree_model, random_truncation
from coarsesigma.rips import ThinTruncationError
from coarsesigma.seqcore import OracleGuardError, OracleModel, oracle_agreement
from coarsesigma.sigma import sigma_level


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--models", type=int, default=300)
    parser.add_argument("--max-points", type=int, default=12)
    parser.add_argument("--scales", type=int, default=3, help="check N = 1..scales")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    tally = collections.Counter()
    paths = []
    t0 = time.perf_counter()
    while tally["models"] < args.models:
        space = random_tree_model(rng, rng.randint(2, args.max_points))
        trunc = random_truncation(rng, space)
        try:
            rows = [oracle_agreement(sigma_level(space, n, trunc), OracleModel(space, trunc))
                    for n in range(1, args.scales + 1)]
        except OracleGuardError:
            tally["guard"] += 1
            continue
        except ThinTruncationError:
            tally["thin"] += 1
            continue
        tally["models"] += 1
        for r in rows:
            tally["levels"] += 1
            tally["agree"] += r.agrees
            paths.append(r.paths)
            if not r.agrees:
                print("disagreement:", r.to_json())
    elapsed = time.perf_counter() - t0
    print(f"{tally['agree']}/{tally['levels']} levels agree on {tally['models']} models "
          f"({tally['guard']} guard redraws, {tally['thin']} thin redraws) in {elapsed:.1f}s")
    if paths:
        print(f"shell-reaching paths per level: max {max(paths)}, mean {sum(paths) / len(paths):.1f}")


if __name__ == "__main__":
    main()
