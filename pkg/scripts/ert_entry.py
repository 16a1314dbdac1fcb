"""Experimental regret testing on Entry Deterrence, one CSV row per frame and run.

    python scripts/ert_entry.py --runs 10 --frames 2000 --out ert_entry.csv
"""

import argparse

from uncoupled.cli import main as cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", default="0")
    ap.add_argument("--runs", default="1")
    ap.add_argument("--frames", default="2000")
    ap.add_argument("--frame-length", default="10000")
    ap.add_argument("--out", default="ert_entry.csv")
    a = ap.parse_args()
    return cli(["preset", "ert-entry", "--seed", a.seed, "--runs", a.runs, "--frames", a.frames,
                "--frame-length", a.frame_length, "--out", a.out])


if __name__ == "__main__":
    raise SystemExit(main())
