"""Command-line front end.

Exit codes: 0 success, 2 usage error (bad flags, unknown rule or game names,
bad rule parameters), 3 input-data error (unreadable or malformed game or
distribution files, invalid numeric inputs such as a non-positive horizon).
Every output starts with the effective configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import engine as E
from . import games as G
from .presets import PRESETS, PresetResult
from .rules import RuleError, parse_rules

USAGE, DATA = 2, 3


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------- argument helpers

def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CliError(DATA, f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CliError(DATA, f"expected comma-separated numbers, got {text!r}") from None


def _random_game_args(body: str) -> dict:
    """``random[n=2,m=3,seed=4,lo=0,hi=1]``; ``m`` may list per-player counts with ``:``."""
    kw: dict = {}
    for tok in filter(None, (t.strip() for t in body.split(","))):
        if "=" not in tok:
            raise CliError(USAGE, f"bad random-game parameter {tok!r}")
        key, val = (s.strip() for s in tok.split("=", 1))
        try:
            if key in ("n", "seed"):
                kw[key] = int(val)
            elif key == "m":
                parts = [int(v) for v in val.split(":")]
                kw[key] = parts[0] if len(parts) == 1 else tuple(parts)
            elif key in ("lo", "hi"):
                kw[key] = float(val)
            else:
                raise CliError(USAGE, f"unknown random-game parameter {key!r}")
        except ValueError:
            raise CliError(DATA, f"bad value {val!r} for {key!r}") from None
    return kw


def load_game_arg(text: str) -> G.Game:
    """A builtin name, ``random[...]``, or a path to a JSON game file."""
    path = Path(text)
    if path.suffix == ".json" or path.exists():
        try:
            return G.load_game(path.read_text())
        except OSError as e:
            raise CliError(DATA, f"cannot read game file {text!r}: {e.strerror}") from None
        except G.GameError as e:
            raise CliError(DATA, f"{text}: {e}") from None
    name, _, rest = text.partition("[")
    kwargs = {}
    if rest:
        if not rest.endswith("]"):
            raise CliError(USAGE, f"malformed game spec {text!r}")
        if name.strip().lower() != "random":
            raise CliError(USAGE, f"only the random game takes parameters, got {text!r}")
        kwargs = _random_game_args(rest[:-1])
    try:
        return G.builtin(name.strip(), **kwargs)
    except G.GameError as e:
        code = USAGE if "unknown builtin" in str(e) else DATA
        raise CliError(code, str(e)) from None


def _rules_arg(text: str, n: int):
    try:
        return parse_rules(text, n)
    except RuleError as e:
        raise CliError(USAGE, str(e)) from None


def _open_out(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", newline=""), True
    except OSError as e:
        raise CliError(DATA, f"cannot write {path!r}: {e.strerror}") from None


def _header(config: dict) -> str:
    return "# config: " + json.dumps(config, sort_keys=True, default=_json_default) + "\n"


def _json_default(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.ndarray, tuple, set)):
        return list(v)
    raise TypeError(f"not serializable: {type(v).__name__}")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return G._fmt_number(float(v))
    return str(v)


def write_table(fh, config: dict, columns: list[str], rows: list[list]) -> None:
    fh.write(_header(config))
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])


# ---------------------------------------------------------------- commands

def _sim_config(args, game) -> E.SimConfig:
    rules = _rules_arg(args.rules, game.n)
    try:
        return E.SimConfig(
            game, rules, args.horizon, seed=args.seed, record=args.record, runs=getattr(args, "runs", 1)
        )
    except E.ConfigError as e:
        raise CliError(DATA, str(e)) from None


def trace_summary(trace: E.Trace) -> dict:
    game = trace.game
    q = E.empirical_joint(trace)
    final = E.final_profile(trace)
    return {
        "final_distribution": {
            ",".join(map(str, s)): float(v) for s, v in zip(game.profiles(), q.ravel(order="F"))
        },
        "min_ce_eps": G.min_ce_eps(game, q),
        "freq_at_pure_ne": {
            ",".join(map(str, s)): E.frequency_in(trace, [s]) for s in G.pure_nash_profiles(game)
        },
        "final_profile": list(final),
        "absorbed_since": E.absorption_time(trace),
        "final_profile_is_pure_ne": G.is_pure_nash(game, final, 0.0),
    }


def cmd_simulate(args) -> int:
    game = load_game_arg(args.game)
    cfg = _sim_config(args, game)
    trace = E.run(cfg, args.run_id)
    config = dict(cfg.echo(), run_id=args.run_id)
    summary = {"config": config, "summary": trace_summary(trace)}
    if args.out:
        fh, close = _open_out(args.out)
        try:
            fh.write(_header(config))
            fh.write(E.trace_to_csv(trace))
        finally:
            if close:
                fh.close()
    sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_batch(args) -> int:
    game = load_game_arg(args.game)
    cfg = _sim_config(args, game)
    report = E.batch(cfg, chunk=args.chunk)
    fh, close = _open_out(args.out)
    try:
        fh.write(report.to_json())
    finally:
        if close:
            fh.close()
    return 0


def _read_distribution(text: str) -> list[float]:
    path = Path(text)
    if path.exists() or path.suffix == ".json":
        try:
            doc = json.loads(path.read_text())
        except OSError as e:
            raise CliError(DATA, f"cannot read distribution file {text!r}: {e.strerror}") from None
        except json.JSONDecodeError as e:
            raise CliError(DATA, f"{text}: line {e.lineno}, column {e.colno}: {e.msg}") from None
        if isinstance(doc, dict):
            doc = doc.get("distribution")
        if not isinstance(doc, list):
            raise CliError(DATA, f"{text}: expected a list of probabilities")
        return doc
    return _float_list(text)


def cmd_check(args) -> int:
    game = load_game_arg(args.game)
    eps = args.eps
    if eps < 0:
        raise CliError(DATA, f"eps must be non-negative, got {eps}")
    given = [a is not None for a in (args.profile, args.mixed, args.dist)]
    if sum(given) != 1:
        raise CliError(USAGE, "give exactly one of --profile, --mixed, --dist")
    lines = []
    try:
        if args.profile is not None:
            s = tuple(_int_list(args.profile))
            q = G.point_mass(game, s)
            lines.append(f"PURE-NE: {'yes' if G.is_pure_nash(game, s, eps) else 'no'}")
            x = [np.eye(mi)[a - 1] for mi, a in zip(game.m, s)]
            lines.append(f"MIXED-εNE: {'yes' if G.is_mixed_eps_nash(game, x, eps) else 'no'}")
        elif args.mixed is not None:
            x = G.check_mixed_profile(game, [_float_list(part) for part in args.mixed.split(";")])
            q = G.product_distribution(x)
            lines.append(f"MIXED-εNE: {'yes' if G.is_mixed_eps_nash(game, x, eps) else 'no'}")
        else:
            q = G.as_joint(game, _read_distribution(args.dist))
    except G.GameError as e:
        raise CliError(DATA, str(e)) from None
    lines.append(f"CE-ε: {'yes' if G.is_correlated_eps_eq(game, q, eps) else 'no'}")
    lines.append(f"min_ce_eps: {G._fmt_number(G.min_ce_eps(game, q))}")
    config = {
        "command": "check",
        "game": game.name or args.game,
        "actions": list(game.m),
        "eps": eps,
        "profile": args.profile,
        "mixed": args.mixed,
        "dist": args.dist,
    }
    sys.stdout.write(_header(config) + "\n".join(lines) + "\n")
    return 0


def cmd_bound(args) -> int:
    m = _int_list(args.m)
    if len(m) == 1:
        m = m * args.n
    try:
        value = G.ce_time_bound(args.n, m, args.eps, args.delta)
    except G.GameError as e:
        raise CliError(DATA, str(e)) from None
    config = {"command": "bound", "n": args.n, "m": m, "eps": args.eps, "delta": args.delta}
    sys.stdout.write(_header(config) + repr(value) + "\n")
    return 0


def _write_preset(result: PresetResult, out: Optional[str]) -> None:
    tables = result.tables
    if len(tables) == 1:
        (name, (cols, rows)), = tables.items()
        fh, close = _open_out(out)
        try:
            write_table(fh, result.config, cols, rows)
        finally:
            if close:
                fh.close()
    else:
        for name, (cols, rows) in tables.items():
            if out is None or out == "-":
                sys.stdout.write(f"# table: {name}\n")
                write_table(sys.stdout, result.config, cols, rows)
            else:
                p = Path(out)
                target = p.with_name(f"{p.stem}_{name}{p.suffix or '.csv'}")
                with open(target, "w", newline="") as fh:
                    write_table(fh, result.config, cols, rows)
    if out not in (None, "-") and result.summary:
        sys.stdout.write(
            json.dumps({"config": result.config, "summary": result.summary}, indent=2,
                       sort_keys=True, default=_json_default) + "\n"
        )


def cmd_preset(args) -> int:
    name = args.name
    if name == "table1":
        result = PRESETS[name](seed=args.seed, runs=args.runs or 200, horizon=args.horizon or 50_000)
    elif name == "mp-rm":
        result = PRESETS[name](
            seed=args.seed, horizon=args.horizon or 100_000, window=args.window,
            every=args.every, stride=args.stride,
        )
    else:
        result = PRESETS[name](seed=args.seed, frames=args.frames, runs=args.runs or 1, T=args.frame_length)
    _write_preset(result, args.out)
    return 0


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(USAGE, f"{self.prog}: {message}")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="uncoupled", description="Repeated-game learning dynamics simulator.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, runs_default=1):
        sp.add_argument("--game", required=True, help="builtin name, random[n=,m=,seed=,lo=,hi=], or JSON file")
        sp.add_argument("--rules", required=True, help="comma-separated rule specs (one per player, or one for all)")
        sp.add_argument("--horizon", type=_positive_int, required=True)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--record", default="full", help="full | summary | thin:k")
        sp.add_argument("--out", default=None)

    s = sub.add_parser("simulate", help="run one simulation, write the trace, print a summary")
    common(s)
    s.add_argument("--run-id", type=int, default=0)
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("batch", help="many seeded runs, JSON report with per-run rows and aggregates")
    common(b)
    b.add_argument("--runs", type=int, default=10)
    b.add_argument("--chunk", type=int, default=None, help="runs advanced together per pass")
    b.set_defaults(func=cmd_batch, record="summary")

    c = sub.add_parser("check", help="equilibrium verdicts for a profile or distribution")
    c.add_argument("--game", required=True)
    c.add_argument("--profile", help="pure profile, 1-based, e.g. 1,1")
    c.add_argument("--mixed", help="mixed profile, players separated by ';', e.g. 0.5,0.5;0.5,0.5")
    c.add_argument("--dist", help="joint distribution in file order: comma list or JSON file")
    c.add_argument("--eps", type=float, default=0.0)
    c.set_defaults(func=cmd_check)

    bd = sub.add_parser("bound", help="time bound for correlated eps-equilibrium discovery")
    bd.add_argument("--n", type=int, required=True)
    bd.add_argument("--m", required=True, help="action count for every player, or a comma list")
    bd.add_argument("--eps", type=float, required=True)
    bd.add_argument("--delta", type=float, required=True)
    bd.set_defaults(func=cmd_bound)

    pr = sub.add_parser("preset", help="fixed experiments: table1, mp-rm, ert-entry")
    pr.add_argument("name", choices=sorted(PRESETS))
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--runs", type=int, default=None)
    pr.add_argument("--horizon", type=int, default=None)
    pr.add_argument("--window", type=int, default=200)
    pr.add_argument("--every", type=int, default=100, help="mp-rm: cumulative series spacing")
    pr.add_argument("--stride", type=int, default=100, help="mp-rm: window series spacing")
    pr.add_argument("--frames", type=int, default=2000, help="ert-entry: number of frames")
    pr.add_argument("--frame-length", type=int, default=10_000, help="ert-entry: periods per frame")
    pr.add_argument("--out", default=None, help="output CSV (multi-table presets add _<table>)")
    pr.set_defaults(func=cmd_preset)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "horizon", None) is not None and args.horizon < 1:
            raise CliError(DATA, f"horizon must be a positive integer, got {args.horizon}")
        return args.func(args)
    except CliError as e:
        sys.stderr.write(f"error: {e}\n")
        return e.code


if __name__ == "__main__":
    sys.exit(main())
