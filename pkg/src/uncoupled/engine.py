"""Seeded repeated-game runner, traces, empirical diagnostics and batches.

Runs are advanced in lockstep: every array carries a leading run axis, and
each run draws only from its own labeled streams (see :mod:`uncoupled.streams`),
so a run's trace is identical whether it is simulated alone or inside any
batch. Rules that hold their mixed action fixed over a frame let the engine
sample a whole block of periods at once; feedback is still one record per
period, delivered as a batch.
"""

from __future__ import annotations

import copy
import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from . import games as G
from .games import Game
from .rules import InfoClass, PayoffFeedback, PlayerContext, Rule, UncoupledFeedback, parse_rule
from .rules.trial_error import MOODS
from .streams import ACTIONS, EVENTS, PRNG_NAME, RULE, UniformStream, generator


class ConfigError(ValueError):
    pass


def parse_record(record: str) -> tuple[str, int]:
    if record in ("full", "summary"):
        return record, 1
    if record.startswith("thin:"):
        try:
            k = int(record[5:])
        except ValueError:
            k = 0
        if k >= 1:
            return "thin", k
    raise ConfigError(f"record must be 'full', 'summary' or 'thin:k' with k >= 1, got {record!r}")


@dataclass
class SimConfig:
    game: Game
    rules: Sequence[Union[Rule, str]]
    horizon: int
    seed: int = 0
    record: str = "full"
    runs: int = 1
    max_block: int = 1 << 16

    def __post_init__(self):
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ConfigError(f"horizon must be a positive integer, got {self.horizon}")
        if len(self.rules) != self.game.n:
            raise ConfigError(f"{len(self.rules)} rules for a {self.game.n}-player game")
        if self.runs < 1:
            raise ConfigError("runs must be at least 1")
        parse_record(self.record)
        self.rules = [parse_rule(r) if isinstance(r, str) else r for r in self.rules]

    def echo(self) -> dict:
        return {
            "game": self.game.name or "custom",
            "actions": list(self.game.m),
            "rules": [r.describe() for r in _bind_rules(self, [0])],
            "horizon": self.horizon,
            "seed": self.seed,
            "record": self.record,
            "runs": self.runs,
            "prng": PRNG_NAME,
        }


@dataclass
class Trace:
    """One run. Profiles are 1-based; ``counts`` covers the whole horizon in file order."""

    game: Game
    run_id: int
    seed: int
    horizon: int
    record: str
    t: np.ndarray
    profiles: np.ndarray
    payoffs: np.ndarray
    moods: Optional[np.ndarray]
    counts: np.ndarray
    last_change: int
    last_profile: tuple[int, ...]
    rules: list[str]
    events: list[tuple[int, int, str]] = field(default_factory=list)
    frames: dict[int, dict[str, np.ndarray]] = field(default_factory=dict)

    @property
    def is_full(self) -> bool:
        return parse_record(self.record)[0] == "full"

    def __len__(self):
        return len(self.t)


def _bind_rules(config: SimConfig, run_ids: Sequence[int]) -> list[Rule]:
    """Fresh copies of the configured rules bound to the given runs."""
    game, seed = config.game, config.seed
    rules = [copy.deepcopy(r) for r in config.rules]
    for i, rule in enumerate(rules):
        rule.bind(
            PlayerContext(
                player=i,
                m=game.m[i],
                runs=len(run_ids),
                payoff_bound=float(game.bounds[i]),
                coins=UniformStream([generator(seed, r, i, RULE) for r in run_ids]),
                event_rngs=[generator(seed, r, i, EVENTS) for r in run_ids],
                own_u=game.u[..., i] if rule.info is InfoClass.UNCOUPLED else None,
            )
        )
    return rules


def _strides(m: Sequence[int]) -> np.ndarray:
    return np.concatenate([[1], np.cumprod(m[:-1])]).astype(np.int64)


def _sample(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling; ``probs`` (R, m), ``u`` (R, L) -> (R, L)."""
    cum = np.cumsum(probs, axis=1)[:, :-1]
    return (u[:, :, None] >= cum[:, None, :]).sum(axis=-1)


def simulate(config: SimConfig, run_ids: Optional[Sequence[int]] = None) -> list[Trace]:
    """Run the given runs of ``config`` in lockstep; one trace per run id."""
    run_ids = list(range(config.runs)) if run_ids is None else [int(r) for r in run_ids]
    game, H, seed = config.game, config.horizon, config.seed
    n, m, R = game.n, game.m, len(run_ids)
    mode, every = parse_record(config.record)

    rules = _bind_rules(config, run_ids)
    streams = [UniformStream([generator(seed, r, i, ACTIONS) for r in run_ids]) for i in range(n)]
    strides = _strides(m)
    flat_pay = game.flat_payoffs
    S = game.num_profiles
    counts = np.zeros((R, S), dtype=np.int64)
    slots = np.arange(R)
    prev_flat = np.full(R, -1)
    last_change = np.ones(R, dtype=np.int64)
    rec_t, rec_a, rec_p, rec_m = [], [], [], []
    annotated = False

    t = 1
    while t <= H:
        L = min([H - t + 1, config.max_block] + [r.block_len(t) for r in rules])
        acts = np.empty((R, L, n), dtype=np.int64)
        moods = np.full((R, n), -1) if annotated or t == 1 else None
        for i, rule in enumerate(rules):
            probs, forced = rule.plan(t, L)
            a = _sample(probs, streams[i].take(L))
            if forced is not None:
                a = np.where(forced >= 0, forced, a)
            acts[..., i] = a
            ann = rule.annotate()
            if ann is not None:
                moods[:, i] = ann
                annotated = True
        acts.setflags(write=False)
        flat = acts @ strides
        pay = flat_pay[flat]

        shared = UncoupledFeedback(acts)
        for i, rule in enumerate(rules):
            if rule.info is InfoClass.UNCOUPLED:
                fb = shared
            else:
                fb = PayoffFeedback(acts[..., i], pay[..., i])
            rule.observe(t, L, fb)

        if L == 1:
            counts[slots, flat[:, 0]] += 1
        else:
            counts += np.bincount(
                (slots[:, None] * S + flat).ravel(), minlength=R * S
            ).reshape(R, S)
        if L == 1:
            last_change[flat[:, 0] != prev_flat] = t
        else:
            edges = np.concatenate([prev_flat[:, None], flat], axis=1)
            changed = edges[:, 1:] != edges[:, :-1]
            last_idx = L - 1 - np.argmax(changed[:, ::-1], axis=1)
            last_change = np.where(changed.any(axis=1), t + last_idx, last_change)
        prev_flat = flat[:, -1]
        last_acts = acts[:, -1]

        if mode != "summary":
            periods = np.arange(t, t + L)
            keep = np.ones(L, bool) if mode == "full" else (periods % every == 0) | (periods == H)
            if keep.any():
                rec_t.append(periods[keep])
                rec_a.append(acts[:, keep])
                rec_p.append(pay[:, keep])
                if annotated:
                    rec_m.append(np.repeat(moods[:, None, :], int(keep.sum()), axis=1))
        t += L

    if rec_t:
        all_t = np.concatenate(rec_t)
        all_a = np.concatenate(rec_a, axis=1) + 1
        all_p = np.concatenate(rec_p, axis=1)
        all_m = np.concatenate(rec_m, axis=1) if annotated else None
    else:
        all_t = np.empty(0, dtype=np.int64)
        all_a = np.empty((R, 0, n), dtype=np.int64)
        all_p = np.empty((R, 0, n))
        all_m = np.empty((R, 0, n), dtype=np.int64)

    described = [r.describe() for r in rules]
    logs = [r.frame_log() for r in rules]
    traces = []
    for k, run in enumerate(run_ids):
        events = sorted(
            (ev_t, i + 1, kind)
            for i, rule in enumerate(rules)
            for slot, ev_t, kind in rule.events
            if slot == k
        )
        frames = {
            i + 1: {key: arr[:, k] for key, arr in log.items()}
            for i, log in enumerate(logs)
            if log is not None
        }
        traces.append(
            Trace(
                game=game,
                run_id=run,
                seed=seed,
                horizon=H,
                record=config.record,
                t=all_t,
                profiles=all_a[k],
                payoffs=all_p[k],
                moods=all_m[k] if annotated and all_m is not None else None,
                counts=counts[k],
                last_change=int(last_change[k]),
                last_profile=tuple(int(a) + 1 for a in last_acts[k]),
                rules=described,
                events=events,
                frames=frames,
            )
        )
    return traces


def run(config: SimConfig, run_id: int = 0) -> Trace:
    """Single run ``run_id`` of ``config`` (run 0 unless told otherwise)."""
    return simulate(config, [run_id])[0]


# ---------------------------------------------------------------- diagnostics

def _require_full(trace: Trace, what: str):
    if not trace.is_full:
        raise ValueError(f"{what} needs a fully recorded trace (record='full'), got {trace.record!r}")


def _flat_index(trace: Trace, upto: int) -> np.ndarray:
    return (trace.profiles[:upto] - 1) @ _strides(trace.game.m)


def empirical_joint(trace: Trace, t: Optional[int] = None) -> np.ndarray:
    """Frequencies of each pure profile over periods ``1..t``, shaped ``game.m``."""
    H = trace.horizon
    t = H if t is None else int(t)
    if not 1 <= t <= H:
        raise ValueError(f"t must lie in 1..{H}, got {t}")
    if t == H:
        counts = trace.counts
    else:
        _require_full(trace, "empirical_joint before the horizon")
        counts = np.bincount(_flat_index(trace, t), minlength=trace.game.num_profiles)
    return (counts / t).reshape(trace.game.m, order="F")


def empirical_marginal(trace: Trace, i: int, t: Optional[int] = None) -> np.ndarray:
    q = empirical_joint(trace, t)
    k = i - 1
    return q.sum(axis=tuple(a for a in range(q.ndim) if a != k))


def cumulative_distributions(trace: Trace, every: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Periods ``every, 2*every, ...`` (and the horizon) with the flat empirical joint at each."""
    _require_full(trace, "cumulative_distributions")
    S = trace.game.num_profiles
    onehot = np.zeros((trace.horizon, S))
    onehot[np.arange(trace.horizon), _flat_index(trace, trace.horizon)] = 1
    cum = np.cumsum(onehot, axis=0)
    ts = np.arange(every, trace.horizon + 1, every)
    if len(ts) == 0 or ts[-1] != trace.horizon:
        ts = np.append(ts, trace.horizon)
    return ts, cum[ts - 1] / ts[:, None]


def moving_window_distribution(trace: Trace, window: int, stride: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Window end periods and flat frequency vectors over each window of ``window`` periods."""
    _require_full(trace, "moving_window_distribution")
    H = trace.horizon
    if window < 1 or stride < 1:
        raise ValueError("window and stride must be positive")
    if window > H:
        raise ValueError(f"window {window} exceeds the trace length {H}")
    S = trace.game.num_profiles
    onehot = np.zeros((H + 1, S))
    onehot[np.arange(1, H + 1), _flat_index(trace, H)] = 1
    cum = np.cumsum(onehot, axis=0)
    ends = np.arange(window, H + 1, stride)
    return ends, (cum[ends] - cum[ends - window]) / window


def frequency_in(trace: Trace, predicate, t: Optional[int] = None) -> float:
    """Fraction of periods ``1..t`` whose (1-based) profile satisfies ``predicate``.

    ``predicate`` is a callable on profile tuples or a collection of profiles.
    """
    if not callable(predicate):
        targets = {tuple(int(a) for a in s) for s in predicate}
        predicate = targets.__contains__
    q = empirical_joint(trace, t).ravel(order="F")
    mask = np.array([bool(predicate(s)) for s in trace.game.profiles()])
    return float(q[mask].sum())


def absorption_time(trace: Trace) -> int:
    """First period from which the realized profile stays constant through the horizon."""
    return trace.last_change


def final_profile(trace: Trace) -> tuple[int, ...]:
    """The profile played in the last period (kept in every record mode)."""
    return trace.last_profile


# ---------------------------------------------------------------- export

def trace_to_csv(trace: Trace) -> str:
    n = trace.game.n
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["t"] + [f"s_{i}" for i in range(1, n + 1)] + [f"pi_{i}" for i in range(1, n + 1)]
    if trace.moods is not None:
        header += [f"mood_{i}" for i in range(1, n + 1)]
    w.writerow(header)
    for k, t in enumerate(trace.t):
        row = [int(t)] + [int(a) for a in trace.profiles[k]] + [G._fmt_number(v) for v in trace.payoffs[k]]
        if trace.moods is not None:
            row += [MOODS[c] if c >= 0 else "" for c in trace.moods[k]]
        w.writerow(row)
    return buf.getvalue()


def pure_nash_targets(game: Game) -> dict[str, set]:
    return {
        "NE" + "(" + ",".join(map(str, s)) + ")": {s} for s in G.pure_nash_profiles(game)
    }


def run_diagnostics(trace: Trace, targets: dict) -> dict:
    out = {"run": trace.run_id}
    for name, pred in targets.items():
        out[f"freq:{name}"] = frequency_in(trace, pred)
    out["min_ce_eps"] = G.min_ce_eps(trace.game, empirical_joint(trace))
    out["absorption_time"] = absorption_time(trace)
    return out


@dataclass
class BatchReport:
    config: dict
    runs: list[dict]
    aggregates: dict

    def to_json(self) -> str:
        return json.dumps(
            {"config": self.config, "aggregates": self.aggregates, "runs": self.runs},
            indent=2,
            sort_keys=True,
        ) + "\n"


def aggregate(rows: Iterable[dict]) -> dict:
    rows = sorted(rows, key=lambda r: r["run"])
    keys = [k for k in rows[0] if k != "run"] if rows else []
    out = {}
    for k in keys:
        vals = np.array([r[k] for r in rows], dtype=float)
        out[k] = {"mean": float(vals.mean()), "std": float(vals.std())}
    return out


def batch(
    config: SimConfig,
    runs: Optional[int] = None,
    targets: Optional[dict] = None,
    chunk: Optional[int] = None,
    order: Optional[Sequence[int]] = None,
    extra: Optional[Callable[[Trace], dict]] = None,
) -> BatchReport:
    """Simulate ``runs`` runs and aggregate per-run diagnostics.

    ``chunk`` bounds how many runs share one lockstep pass and ``order`` sets
    the execution order; neither changes the report.
    """
    R = config.runs if runs is None else int(runs)
    if R < 1:
        raise ConfigError("runs must be at least 1")
    targets = pure_nash_targets(config.game) if targets is None else targets
    ids = list(range(R)) if order is None else [int(r) for r in order]
    if sorted(ids) != list(range(R)):
        raise ConfigError("order must be a permutation of the run ids")
    chunk = len(ids) if chunk is None else max(1, int(chunk))
    rows = []
    for start in range(0, len(ids), chunk):
        for trace in simulate(config, ids[start:start + chunk]):
            row = run_diagnostics(trace, targets)
            if extra is not None:
                row.update(extra(trace))
            rows.append(row)
    rows.sort(key=lambda r: r["run"])
    echo = dict(config.echo(), runs=R, targets=sorted(targets))
    return BatchReport(config=echo, runs=rows, aggregates=aggregate(rows))
