"""Regret Matching in Matching Pennies: final min_ce_eps across inertia values and horizons.

    python scripts/mu_sweep.py --runs 20 --mus 2.5,5,10,20,40 --horizons 100000,400000
"""

import argparse
import json

import numpy as np

from uncoupled import engine as E
from uncoupled import games as G


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mus", default="2.5,5,10,20,40")
    ap.add_argument("--horizons", default="100000")
    args = ap.parse_args()

    game = G.matching_pennies()
    print("mu,horizon,median,max,runs_le_0.05")
    for H in (int(h) for h in args.horizons.split(",")):
        for mu in (float(v) for v in args.mus.split(",")):
            rule = f"regret-matching[mu={mu:g}]"
            cfg = E.SimConfig(game, [rule, rule], H, seed=args.seed, runs=args.runs, record="summary")
            vals = np.array([G.min_ce_eps(game, E.empirical_joint(tr)) for tr in E.simulate(cfg)])
            print(f"{mu:g},{H},{np.median(vals):.4f},{vals.max():.4f},{int((vals <= 0.05).sum())}", flush=True)
    print("# config: " + json.dumps({"seed": args.seed, "runs": args.runs, "game": game.name}))


if __name__ == "__main__":
    main()
