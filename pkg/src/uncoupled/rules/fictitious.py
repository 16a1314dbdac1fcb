"""Fictitious play: best reply to the opponents' empirical history."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import InfoClass, Rule, UncoupledFeedback, uniform


def argmax_uniform(scores: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Uniform mixed action over the (tolerance-widened) argmax set of each row."""
    best = scores >= scores.max(axis=1, keepdims=True) - tol
    return best / best.sum(axis=1, keepdims=True)


@dataclass
class FictitiousPlay(Rule):
    """Play a best reply to the cumulative payoffs of each own action.

    Ties (and the first period) are resolved by a uniform draw; ties are
    detected with a relative tolerance so float sums do not split them.
    """

    name = "fictitious"
    info = InfoClass.UNCOUPLED

    def reset(self):
        self.alt = np.zeros((self.ctx.runs, self.ctx.m))
        self.t = 0

    def plan(self, t, L):
        if self.t == 0:
            return uniform(self.ctx.runs, self.ctx.m), None
        tol = 1e-9 * max(1.0, self.ctx.payoff_bound) * self.t
        return argmax_uniform(self.alt, tol), None

    def _observe(self, t, L, fb: UncoupledFeedback):
        self.alt += self.own_lines(fb.profiles).sum(axis=1)
        self.t += L
