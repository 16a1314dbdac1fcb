"""Regret Matching in Matching Pennies: cumulative and moving-window joint distributions.

    python scripts/mp_rm.py --horizon 100000 --window 200 --out mp_rm.csv
    # writes mp_rm_cumulative.csv and mp_rm_window.csv
"""

import argparse

from uncoupled.cli import main as cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", default="0")
    ap.add_argument("--horizon", default="100000")
    ap.add_argument("--window", default="200")
    ap.add_argument("--stride", default="100")
    ap.add_argument("--out", default="mp_rm.csv")
    a = ap.parse_args()
    return cli(["preset", "mp-rm", "--seed", a.seed, "--horizon", a.horizon, "--window", a.window,
                "--stride", a.stride, "--out", a.out])


if __name__ == "__main__":
    raise SystemExit(main())
