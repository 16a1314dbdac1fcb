"""The three fixed experiments, as library calls returning plain tables.

Each preset returns a :class:`PresetResult`: a config echo (every parameter,
defaults resolved, plus the master seed and PRNG) and one or more named tables
with a fixed column list. The CLI only serializes these.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import games as G
from .engine import SimConfig, cumulative_distributions, empirical_joint, moving_window_distribution, run, simulate
from .rules import ExperimentalRegretTesting, PhiFunction, RegretMatching, TrialAndError
from .rules.regret_testing import KEEP, TRIGGERS
from .streams import PRNG_NAME

# Reference frequencies of (P1, P2) for each acceptance function, before the
# (1 - eps) scaling. Reported beside the measured values; never asserted here.
TABLE1_PHIS = {
    "phi1": (PhiFunction(0.001, 0.05, 0.95), (0.471, 0.529)),
    "phi2": (PhiFunction(0.6, 0.1, 0.05), (0.718, 0.282)),
    "phi3": (PhiFunction(0.2, 0.4, 0.15), (0.125, 0.875)),
}
TABLE1_EPS = 0.01

TABLE1_COLUMNS = [
    "phi", "p", "q", "c", "lo", "hi", "runs", "horizon",
    "freq_P1", "freq_P2", "sd_P1", "sd_P2", "min_P1_plus_P2",
    "reference_P1", "reference_P2", "reference_P1_scaled", "reference_P2_scaled",
]

ERT_COLUMNS = [
    "run", "frame", "t_end",
    "x1_1", "x1_2", "x2_1", "x2_2",
    "regret1_1", "regret1_2", "regret2_1", "regret2_2",
    "trigger_1", "trigger_2", "max_gain", "nash_0.15", "neighborhood",
]


@dataclass
class PresetResult:
    config: dict
    tables: dict[str, tuple[list[str], list[list]]]
    summary: dict = field(default_factory=dict)


def _profile_labels(game: G.Game, prefix: str) -> list[str]:
    return [prefix + "_" + "_".join(map(str, s)) for s in game.profiles()]


# ---------------------------------------------------------------- trial-and-error frequencies

def table1_sets(game: G.Game) -> tuple[set, set]:
    """P1 = profiles paying (2, 2); P2 = profiles paying (1, 4)."""
    p1, p2 = set(), set()
    for s, pay in zip(game.profiles(), game.flat_payoffs):
        if tuple(pay) == (2, 2):
            p1.add(s)
        elif tuple(pay) == (1, 4):
            p2.add(s)
    return p1, p2


def table1_frequencies(traces, game: G.Game) -> tuple[np.ndarray, np.ndarray]:
    """Per-run frequency of P1 and P2 over the whole horizon."""
    p1, p2 = table1_sets(game)
    profiles = list(game.profiles())
    m1 = np.array([s in p1 for s in profiles])
    m2 = np.array([s in p2 for s in profiles])
    q = np.array([empirical_joint(tr).ravel(order="F") for tr in traces])
    return q[:, m1].sum(axis=1), q[:, m2].sum(axis=1)


def preset_table1(seed: int = 0, runs: int = 200, horizon: int = 50_000, eps: float = TABLE1_EPS) -> PresetResult:
    game = G.entry_deterrence()
    rows, summary = [], {}
    for key, (phi, (ref1, ref2)) in TABLE1_PHIS.items():
        rule = TrialAndError(eps=eps, phi=phi)
        cfg = SimConfig(game, [rule, rule], horizon, seed=seed, runs=runs, record="summary")
        f1, f2 = table1_frequencies(simulate(cfg), game)
        rows.append([
            key, phi.p, phi.q, phi.c, phi.lo, phi.hi, runs, horizon,
            float(f1.mean()), float(f2.mean()), float(f1.std()), float(f2.std()),
            float((f1 + f2).min()),
            ref1, ref2, ref1 * (1 - eps), ref2 * (1 - eps),
        ])
        summary[key] = {"freq_P1": f1.tolist(), "freq_P2": f2.tolist()}
    config = {
        "preset": "table1",
        "game": game.name,
        "rules": [TrialAndError(eps=eps, phi=phi).describe() for phi, _ in TABLE1_PHIS.values()],
        "P1": sorted(table1_sets(game)[0]),
        "P2": sorted(table1_sets(game)[1]),
        "seed": seed,
        "runs": runs,
        "horizon": horizon,
        "eps": eps,
        "prng": PRNG_NAME,
    }
    return PresetResult(config, {"table1": (TABLE1_COLUMNS, rows)}, summary)


# ---------------------------------------------------------------- Matching Pennies / RM

def preset_mp_rm(
    seed: int = 0, horizon: int = 100_000, window: int = 200, every: int = 100, stride: int = 100,
    mu: Optional[float] = None,
) -> PresetResult:
    """Series A: cumulative empirical joint; series B: moving-window joints."""
    game = G.matching_pennies()
    rule = RegretMatching(mu=mu)
    cfg = SimConfig(game, [rule, rule], horizon, seed=seed)
    trace = run(cfg)
    labels = _profile_labels(game, "q")

    ts, cum = cumulative_distributions(trace, every)
    a_rows = [[int(t)] + d.tolist() + [G.min_ce_eps(game, d)] for t, d in zip(ts, cum)]
    ends, win = moving_window_distribution(trace, window, stride)
    b_rows = [[int(t)] + d.tolist() + [G.min_ce_eps(game, d)] for t, d in zip(ends, win)]

    config = dict(cfg.echo(), preset="mp-rm", window=window, every=every, stride=stride)
    summary = {
        "final_min_ce_eps": a_rows[-1][-1],
        "max_window_min_ce_eps": max(r[-1] for r in b_rows),
    }
    return PresetResult(
        config,
        {
            "cumulative": (["t"] + labels + ["min_ce_eps"], a_rows),
            "window": (["t_end"] + labels + ["min_ce_eps"], b_rows),
        },
        summary,
    )


# ---------------------------------------------------------------- ERT on Entry Deterrence

def nash_neighborhood(game: G.Game, x, eps: float) -> int:
    """0 if ``x`` is not a Nash ``eps``-equilibrium, else 1 + index of the nearest pure NE."""
    if not G.is_mixed_eps_nash(game, x, eps):
        return 0
    targets = G.pure_nash_profiles(game)
    dist = [
        max(abs(1.0 - x[i][s[i] - 1]) for i in range(game.n)) for s in targets
    ]
    return 1 + int(np.argmin(dist))


def capture_stats(keep: np.ndarray, nash: np.ndarray, streak: int = 10) -> dict:
    """Capture = first ``streak`` consecutive frames with every player keeping.

    Returns the capture frame (0-based index of the streak's last frame, or
    ``None``) and the share of later frames that are Nash equilibria.
    """
    run_len = 0
    for f, k in enumerate(keep):
        run_len = run_len + 1 if k else 0
        if run_len >= streak:
            rest = nash[f + 1:]
            share = float(rest.mean()) if len(rest) else 1.0
            return {"capture_frame": f, "nash_share_after": share}
    return {"capture_frame": None, "nash_share_after": 0.0}


def unexplained_switches(hood: np.ndarray, redraw: np.ndarray) -> int:
    """Changes of neighborhood between Nash frames with no redraw in between."""
    count, last, redraw_since = 0, 0, False
    for h, r in zip(hood, redraw):
        if h:
            if last and h != last and not redraw_since:
                count += 1
            last, redraw_since = h, False
        redraw_since |= bool(r)
    return count


def preset_ert_entry(
    seed: int = 0, frames: int = 2000, runs: int = 1,
    T: int = 10_000, rho: float = 0.12, lam: float = 1e-3, nash_eps: float = 0.15, streak: int = 10,
) -> PresetResult:
    game = G.entry_deterrence()
    rule = ExperimentalRegretTesting(T=T, rho=rho, lam=lam)
    cfg = SimConfig(game, [rule, rule], T * frames, seed=seed, runs=runs, record="summary")
    rows, per_run = [], []
    for trace in simulate(cfg):
        x = [trace.frames[i]["x"] for i in (1, 2)]
        reg = [trace.frames[i]["regret"] for i in (1, 2)]
        code = [trace.frames[i]["code"] for i in (1, 2)]
        ends = trace.frames[1]["end"]
        gains = np.array([G.deviation_gains(game, [x[0][f], x[1][f]]).max() for f in range(frames)])
        hood = np.array([nash_neighborhood(game, [x[0][f], x[1][f]], nash_eps) for f in range(frames)])
        nash = hood > 0
        keep = (code[0] == KEEP) & (code[1] == KEEP)
        for f in range(frames):
            rows.append([
                trace.run_id, f + 1, int(ends[f]),
                *x[0][f].tolist(), *x[1][f].tolist(),
                *reg[0][f].tolist(), *reg[1][f].tolist(),
                TRIGGERS[code[0][f]], TRIGGERS[code[1][f]],
                float(gains[f]), int(nash[f]), int(hood[f]),
            ])
        stats = capture_stats(keep, nash, streak)
        stats.update(
            run=trace.run_id,
            switches_without_redraw=unexplained_switches(hood, ~keep),
            neighborhoods=sorted({int(h) for h in hood if h}),
            final_neighborhood=int(hood[-1]),
        )
        per_run.append(stats)
    config = dict(
        cfg.echo(), preset="ert-entry", frames=frames, nash_eps=nash_eps, capture_streak=streak,
        neighborhoods={i + 1: list(s) for i, s in enumerate(G.pure_nash_profiles(game))},
    )
    return PresetResult(config, {"frames": (ERT_COLUMNS, rows)}, {"runs": per_run})


PRESETS = {"table1": preset_table1, "mp-rm": preset_mp_rm, "ert-entry": preset_ert_entry}
