"""Rule interface shared by every learning rule.

A rule instance plays one player across ``R`` lockstep runs. The engine
calls, for each block of periods starting at ``t``:

* ``block_len(t)``: how many periods the rule can commit to without feedback
  (1 for per-period rules, the rest of the frame for frame rules);
* ``plan(t, L)``: the mixed action ``(R, m)`` for the block, plus optional
  forced actions ``(R, L)`` where ``-1`` means "sample from the mixed action";
* ``observe(t, L, feedback)``: the block's feedback of the rule's declared
  information class.

Uncoupled rules are bound with their own payoff tensor; completely uncoupled
rules never see it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import ClassVar, Optional

import numpy as np

from ..streams import UniformStream


class InfoClass(enum.Enum):
    UNCOUPLED = "uncoupled"
    COMPLETELY_UNCOUPLED = "completely_uncoupled"


class RuleError(ValueError):
    """Invalid rule parameters or specification."""


class FeedbackClassError(TypeError):
    """A rule received feedback of the wrong information class."""


@dataclass(frozen=True)
class UncoupledFeedback:
    """Realized profiles ``(R, L, n)``, 0-based."""

    profiles: np.ndarray


@dataclass(frozen=True)
class PayoffFeedback:
    """Own actions ``(R, L)`` (0-based) and own realized payoffs ``(R, L)``."""

    actions: np.ndarray
    payoffs: np.ndarray


FEEDBACK_TYPES = {
    InfoClass.UNCOUPLED: UncoupledFeedback,
    InfoClass.COMPLETELY_UNCOUPLED: PayoffFeedback,
}


@dataclass
class PlayerContext:
    player: int  # 0-based
    m: int
    runs: int
    payoff_bound: float
    coins: UniformStream
    event_rngs: list
    own_u: Optional[np.ndarray] = None


class Rule:
    name: ClassVar[str] = "rule"
    info: ClassVar[InfoClass] = InfoClass.UNCOUPLED

    def bind(self, ctx: PlayerContext) -> None:
        if self.info is InfoClass.UNCOUPLED and ctx.own_u is None:
            raise FeedbackClassError(f"{self.name} is uncoupled and needs its own payoff function")
        if self.info is InfoClass.COMPLETELY_UNCOUPLED and ctx.own_u is not None:
            raise FeedbackClassError(f"{self.name} is completely uncoupled; it must not see payoffs")
        self.ctx = ctx
        self.events: list[tuple[int, int, str]] = []  # (run slot, period, kind)
        self.slots = np.arange(ctx.runs)
        if ctx.own_u is not None:
            self._build_line_table(ctx.own_u, ctx.player)
        self.reset()

    def _build_line_table(self, own_u: np.ndarray, i: int) -> None:
        # row = opponents' flat profile index (own axis dropped), column = own action
        m = own_u.shape
        opp = [k for k in range(len(m)) if k != i]
        strides = np.zeros(len(m), dtype=np.int64)
        acc = 1
        for k in opp:
            strides[k] = acc
            acc *= m[k]
        self._opp_strides = strides
        lines = np.empty((acc, m[i]))
        for a in range(m[i]):
            lines[:, a] = np.take(own_u, a, axis=i).ravel(order="F")
        self._line_table = lines

    def reset(self) -> None:
        pass

    def block_len(self, t: int) -> int:
        return 1

    def plan(self, t: int, L: int):
        raise NotImplementedError

    def observe(self, t: int, L: int, fb) -> None:
        expected = FEEDBACK_TYPES[self.info]
        if not isinstance(fb, expected):
            raise FeedbackClassError(
                f"{self.name} declares {self.info.value} feedback, got {type(fb).__name__}"
            )
        self._observe(t, L, fb)

    def _observe(self, t: int, L: int, fb) -> None:
        raise NotImplementedError

    def annotate(self) -> Optional[np.ndarray]:
        """Per-run integer annotation (e.g. mood code) for the trace, if any."""
        return None

    def frame_log(self) -> Optional[dict]:
        """Per-frame arrays with shape ``(frames, R, ...)``, if the rule works in frames."""
        return None

    def describe(self) -> str:
        return self.name

    # helpers
    def own_lines(self, profiles: np.ndarray) -> np.ndarray:
        """Own payoff for each own action against the opponents in ``profiles`` (..., n)."""
        return self._line_table[profiles @ self._opp_strides]

    def uniform_simplex(self, rows) -> np.ndarray:
        """Flat-Dirichlet draws for the given run slots, shape ``(len(rows), m)``."""
        m = self.ctx.m
        return np.array([self.ctx.event_rngs[r].dirichlet(np.ones(m)) for r in rows]).reshape(-1, m)


def uniform(runs: int, m: int) -> np.ndarray:
    return np.full((runs, m), 1.0 / m)


def one_hot(actions: np.ndarray, m: int) -> np.ndarray:
    return np.eye(m)[actions]


def sample_box_simplex(
    rng: np.random.Generator, center: np.ndarray, radius: float, max_tries: int = 100
) -> np.ndarray:
    """Uniform draw from the l-infinity ball around ``center`` intersected with the simplex.

    The first ``m - 1`` coordinates are drawn uniformly in the box and the last
    is implied; rejection keeps the draw inside both sets. After ``max_tries``
    failures the last candidate is clipped and renormalized.
    """
    center = np.asarray(center, dtype=float)
    lo = np.maximum(center[:-1] - radius, 0.0)
    hi = np.minimum(center[:-1] + radius, 1.0)
    y = center
    for _ in range(max_tries):
        head = rng.uniform(lo, hi)
        last = 1.0 - head.sum()
        y = np.append(head, last)
        if last >= 0 and abs(last - center[-1]) <= radius:
            return y
    y = np.clip(y, np.maximum(center - radius, 0.0), center + radius)
    return y / y.sum()
