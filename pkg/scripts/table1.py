"""Trial-and-error learning on Entry Deterrence for the three acceptance functions.

    python scripts/table1.py --runs 200 --horizon 50000 --out table1.csv
"""

import argparse

from uncoupled.cli import main as cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", default="0")
    ap.add_argument("--runs", default="200")
    ap.add_argument("--horizon", default="50000")
    ap.add_argument("--out", default="table1.csv")
    a = ap.parse_args()
    return cli(["preset", "table1", "--seed", a.seed, "--runs", a.runs, "--horizon", a.horizon, "--out", a.out])


if __name__ == "__main__":
    raise SystemExit(main())
