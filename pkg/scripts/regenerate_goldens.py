"""Rewrite the stored example goldens and report which files changed."""

import argparse
from pathlib import Path

from coarsesigma.examples import GOLDEN_DIR, write_goldens


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=GOLDEN_DIR, help="golden directory")
    args = parser.parse_args()
    before = {p.name: p.read_bytes() for p in args.out.glob("*.json")}
    for path in write_goldens(args.out):
        state = "unchanged" if before.get(path.name) == path.read_bytes() else "written"
        print(f"{state:9s} {path}")


if __name__ == "__main__":
    main()
