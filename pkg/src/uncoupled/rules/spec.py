"""Parse rule specification strings such as ``ert[T=10000,rho=0.12,lambda=0.001]``."""

from __future__ import annotations

import re

from .base import Rule, RuleError
from .fictitious import FictitiousPlay
from .pure import SimplePure, TwoRecall
from .regret_matching import ModifiedRegretMatching, RegretMatching
from .regret_testing import Alert, ExperimentalRegretTesting, PayoffAlert
from .trial_error import PhiFunction, TrialAndError

# rule name -> (class, {spec key: constructor argument})
REGISTRY: dict[str, tuple[type, dict[str, str]]] = {
    "regret-matching": (RegretMatching, {"mu": "mu"}),
    "modified-rm": (ModifiedRegretMatching, {"gamma": "gamma", "delta": "delta", "mu": "mu"}),
    "ert": (ExperimentalRegretTesting, {"T": "T", "rho": "rho", "lambda": "lam"}),
    "alert": (Alert, {"start": "start_regime"}),
    "payoff-alert": (PayoffAlert, {"g": "g", "start": "start_regime"}),
    "simple-pure": (SimplePure, {}),
    "two-recall": (TwoRecall, {}),
    "trial-error": (TrialAndError, {"eps": "eps", "phi": "phi"}),
    "fictitious": (FictitiousPlay, {}),
}

_SPEC = re.compile(r"^\s*([a-z][a-z0-9-]*)\s*(?:\[(.*)\])?\s*$")


def split_rule_list(text: str) -> list[str]:
    """Split on commas that are not inside brackets."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out if s.strip()]


def _number(token: str, text: str):
    try:
        v = float(token)
    except ValueError:
        raise RuleError(f"bad number {token!r} in rule spec {text!r}") from None
    return int(v) if v.is_integer() and "." not in token and "e" not in token.lower() else v


def parse_rule(text: str) -> Rule:
    match = _SPEC.match(text)
    if not match:
        raise RuleError(f"malformed rule spec {text!r}")
    name, body = match.group(1), match.group(2)
    if name not in REGISTRY:
        raise RuleError(f"unknown rule {name!r}; known: {', '.join(sorted(REGISTRY))}")
    cls, keys = REGISTRY[name]
    raw: dict[str, list[str]] = {}
    last = None
    for tok in (body or "").split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "=" in tok:
            key, val = (s.strip() for s in tok.split("=", 1))
            if key not in keys:
                raise RuleError(f"unknown parameter {key!r} for rule {name!r} in {text!r}")
            raw[key] = [val]
            last = key
        elif last is not None:
            raw[last].append(tok)
        else:
            raise RuleError(f"stray token {tok!r} in rule spec {text!r}")
    kwargs = {}
    for key, vals in raw.items():
        if key == "phi":
            nums = [float(_number(v, text)) for v in vals]
            if len(nums) not in (3, 5):
                raise RuleError(f"phi needs 3 or 5 numbers (p,q,c[,lo,hi]), got {vals}")
            kwargs["phi"] = PhiFunction(*nums)
        elif len(vals) != 1:
            raise RuleError(f"parameter {key!r} takes one value in {text!r}")
        elif vals[0] == "auto":
            kwargs[keys[key]] = None
        else:
            kwargs[keys[key]] = _number(vals[0], text)
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise RuleError(f"{text!r}: {e}") from None


def parse_rules(text: str, n: int) -> list[Rule]:
    """Parse a comma list of rule specs; a single spec is replicated for all ``n`` players."""
    specs = split_rule_list(text)
    if len(specs) == 1:
        specs = specs * n
    if len(specs) != n:
        raise RuleError(f"{len(specs)} rule specs given for {n} players")
    return [parse_rule(s) for s in specs]
