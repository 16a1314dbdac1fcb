"""Trial-and-error learning: a completely uncoupled mood machine."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import InfoClass, PayoffFeedback, Rule, RuleError, uniform

CONTENT, WATCHFUL, HOPEFUL, DISCONTENT = range(4)
MOODS = ("content", "watchful", "hopeful", "discontent")


@dataclass(frozen=True)
class PhiFunction:
    """Acceptance probability ``clip(p*a - q*b + c, lo, hi)``.

    ``a`` is the newly realized payoff, ``b`` the old benchmark payoff.
    """

    p: float
    q: float
    c: float
    lo: float = 0.01
    hi: float = 0.99

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise RuleError("phi needs p > 0 and q > 0")
        if not 0 < self.lo <= self.hi < 1:
            raise RuleError("phi clamp bounds must satisfy 0 < lo <= hi < 1")

    def __call__(self, a, b):
        return np.clip(self.p * np.asarray(a) - self.q * np.asarray(b) + self.c, self.lo, self.hi)


def _tables():
    # index: [mood, sign(payoff - benchmark) + 1, on_benchmark, accept]
    mood = np.empty((4, 3, 2, 2), dtype=np.int64)
    take = np.zeros((4, 3, 2, 2), dtype=bool)  # adopt the played action as benchmark
    repay = np.zeros((4, 3, 2, 2), dtype=bool)  # reset benchmark payoff to the realized one
    mood[CONTENT] = CONTENT
    mood[CONTENT, 0, 1] = WATCHFUL
    mood[CONTENT, 2, 1] = HOPEFUL
    take[CONTENT, 2, 0] = repay[CONTENT, 2, 0] = True
    mood[WATCHFUL, 0], mood[WATCHFUL, 1], mood[WATCHFUL, 2] = DISCONTENT, CONTENT, HOPEFUL
    mood[HOPEFUL, 0], mood[HOPEFUL, 1:] = WATCHFUL, CONTENT
    repay[HOPEFUL, 2] = True
    mood[DISCONTENT, ..., 0], mood[DISCONTENT, ..., 1] = DISCONTENT, CONTENT
    take[DISCONTENT, ..., 1] = repay[DISCONTENT, ..., 1] = True
    return mood, take, repay


_NEXT_MOOD, _TAKE, _REPAY = _tables()


def te_transition(mood, bench, bench_pi, action, payoff, accept):
    """Next ``(mood, bench, bench_pi)`` after playing ``action`` and earning ``payoff``.

    ``accept`` is the outcome of the discontent acceptance coin and is ignored
    in every other mood. All arguments broadcast elementwise.
    """
    mood, bench, bench_pi, action, payoff, accept = np.broadcast_arrays(
        *(np.asarray(v) for v in (mood, bench, bench_pi, action, payoff, accept))
    )
    key = (
        mood,
        np.sign(payoff - bench_pi).astype(np.int64) + 1,
        (action == bench).astype(np.int64),
        accept.astype(np.int64),
    )
    new_bench = np.where(_TAKE[key], action, bench)
    new_pi = np.where(_REPAY[key], payoff, bench_pi).astype(float)
    return _NEXT_MOOD[key], new_bench, new_pi


@dataclass
class TrialAndError(Rule):
    """Content players experiment with probability ``eps``; discontent ones search.

    The first period is a uniform draw after which the player is content with
    that action and payoff as benchmark.
    """

    eps: float = 0.01
    phi: PhiFunction = field(default_factory=lambda: PhiFunction(0.6, 0.1, 0.05))

    name = "trial-error"
    info = InfoClass.COMPLETELY_UNCOUPLED

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise RuleError(f"eps must lie in (0, 1), got {self.eps}")
        if not isinstance(self.phi, PhiFunction):
            self.phi = PhiFunction(*self.phi)

    def reset(self):
        R = self.ctx.runs
        self.started = False
        self.mood = np.full(R, CONTENT)
        self.bench = np.zeros(R, dtype=int)
        self.bench_pi = np.zeros(R)
        m = self.ctx.m
        self._on_bench = np.array([1 - self.eps, 1.0, 1.0, 1.0 / m])
        self._off_bench = np.array([self.eps / max(m - 1, 1), 0.0, 0.0, 1.0 / m])

    def plan(self, t, L):
        R, m = self.ctx.runs, self.ctx.m
        if not self.started:
            return uniform(R, m), None
        # rows: content (mostly benchmark), watchful/hopeful (benchmark), discontent (uniform)
        off = self._off_bench[self.mood]
        x = np.broadcast_to(off[:, None], (R, m)).copy()
        x[self.slots, self.bench] = self._on_bench[self.mood]
        return x, None

    def _observe(self, t, L, fb: PayoffFeedback):
        a, pay = fb.actions[:, 0], fb.payoffs[:, 0]
        coin = self.ctx.coins.take1()
        if not self.started:
            self.started = True
            self.bench, self.bench_pi = a.copy(), pay.astype(float)
            return
        accept = coin < self.phi(pay, self.bench_pi)
        self.mood, self.bench, self.bench_pi = te_transition(
            self.mood, self.bench, self.bench_pi, a, pay, accept
        )

    def annotate(self):
        return self.mood

    def describe(self):
        f = self.phi
        return f"{self.name}[eps={self.eps:g},phi={f.p:g},{f.q:g},{f.c:g},{f.lo:g},{f.hi:g}]"
