"""Two naive uncoupled rules that settle on a pure Nash equilibrium."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import InfoClass, Rule, RuleError, UncoupledFeedback, one_hot, uniform

# Block length requested once play is absorbed; the engine clamps it.
ABSORBED_BLOCK = 1 << 30


def _is_best(lines: np.ndarray, own: np.ndarray) -> np.ndarray:
    got = np.take_along_axis(lines, own[:, None], axis=1)[:, 0]
    return got >= lines.max(axis=1)


@dataclass
class SimplePure(Rule):
    """Odd periods explore uniformly; even periods signal (action 1) a best reply.

    Once an even period shows every player on action 1 the player freezes on
    her last odd-period action.
    """

    name = "simple-pure"
    info = InfoClass.UNCOUPLED

    def reset(self):
        if self.ctx.m < 2:
            raise RuleError("simple-pure needs at least two actions")
        R = self.ctx.runs
        self.converged = np.zeros(R, dtype=bool)
        self.last_odd = np.zeros(R, dtype=int)
        self.was_best = np.zeros(R, dtype=bool)

    def plan(self, t, L):
        m = self.ctx.m
        if t % 2 == 1:
            x = uniform(self.ctx.runs, m)
        else:
            x = one_hot(np.where(self.was_best, 0, 1), m)
        frozen = one_hot(self.last_odd, m)
        return np.where(self.converged[:, None], frozen, x), None

    def block_len(self, t):
        # every player sees the same all-ones signal, so all freeze together
        return ABSORBED_BLOCK if self.converged.all() else 1

    def _observe(self, t, L, fb: UncoupledFeedback):
        if L > 1:
            return  # only requested once frozen: nothing left to update
        p = fb.profiles[:, 0]
        own = p[:, self.ctx.player]
        live = ~self.converged
        if t % 2 == 1:
            self.last_odd = np.where(live, own, self.last_odd)
            self.was_best = _is_best(self.own_lines(p), own)
        else:
            self.converged |= live & np.all(p == 0, axis=1)


@dataclass
class TwoRecall(Rule):
    """Repeat when the last two profiles agree and the own action was a best reply."""

    name = "two-recall"
    info = InfoClass.UNCOUPLED

    def reset(self):
        R = self.ctx.runs
        self.prev = None
        self.repeat = np.zeros(R, dtype=bool)
        self.last_own = np.zeros(R, dtype=int)

    def plan(self, t, L):
        m = self.ctx.m
        stay = one_hot(self.last_own, m)
        return np.where(self.repeat[:, None], stay, uniform(self.ctx.runs, m)), None

    def block_len(self, t):
        # If every player repeats, the profile repeats and every flag stays set;
        # if only this one does, another player's block length is 1.
        return ABSORBED_BLOCK if self.repeat.all() else 1

    def _observe(self, t, L, fb: UncoupledFeedback):
        p = fb.profiles[:, -1]
        own = p[:, self.ctx.player]
        if L > 1:
            self.prev = fb.profiles[:, -2]
        if self.prev is None:
            self.repeat[:] = False
        else:
            self.repeat = np.all(p == self.prev, axis=1) & _is_best(self.own_lines(p), own)
        self.prev = p.copy()
        self.last_own = own
