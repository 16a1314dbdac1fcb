"""Regret Matching and its payoff-only (modified) variant."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..regret import EstimatedTally, RegretTally
from .base import InfoClass, PayoffFeedback, Rule, RuleError, UncoupledFeedback


def regret_matching_probs(avg_row: np.ndarray, j: np.ndarray, mu: float) -> np.ndarray:
    """Next mixed action from the average internal regrets of switching away from ``j``.

    ``avg_row[r, k]`` is the average internal regret of replacing ``j[r]`` by
    ``k``. Off-``j`` mass is ``max(avg, 0) / mu``; the remainder stays on ``j``.
    """
    runs = np.arange(len(j))
    x = np.maximum(avg_row, 0.0) / mu
    x[runs, j] = 0.0
    x[runs, j] = 1.0 - x.sum(axis=1)
    return x


def modified_rm_probs(
    est_row: np.ndarray, j: np.ndarray, mu: float, delta: float, gamma: float, t: int
) -> np.ndarray:
    """Exploring update driven by estimated internal regrets."""
    m = est_row.shape[1]
    runs = np.arange(len(j))
    explore = delta / t**gamma
    x = (1.0 - explore) * np.minimum(np.maximum(est_row, 0.0) / mu, 1.0 / m) + explore / m
    x[runs, j] = 0.0
    x[runs, j] = 1.0 - x.sum(axis=1)
    return x


@dataclass
class RegretMatching(Rule):
    """Switch away from the last action in proportion to average internal regret.

    ``mu=None`` resolves to ``2 * M * m + 1`` once the payoff bound is known.
    """

    mu: Optional[float] = None

    name = "regret-matching"
    info = InfoClass.UNCOUPLED

    def reset(self):
        m, M = self.ctx.m, self.ctx.payoff_bound
        self.mu_ = 2 * M * m + 1 if self.mu is None else float(self.mu)
        if not self.mu_ > 2 * M * (m - 1):
            raise RuleError(f"mu must exceed 2*M*(m-1) = {2 * M * (m - 1)}, got {self.mu_}")
        # positive-part mass off j is at most (m-1) * 2M / mu
        self.stay_floor = 1.0 - (m - 1) * 2 * M / self.mu_
        self.tally = RegretTally(m, self.ctx.runs)
        self.x = self.uniform_simplex(range(self.ctx.runs))

    def plan(self, t, L):
        return self.x, None

    def _observe(self, t, L, fb: UncoupledFeedback):
        p = fb.profiles[:, 0]
        j = p[:, self.ctx.player]
        self.tally.update(self.own_lines(p), j)
        avg = self.tally.internal[self.slots, j] / self.tally.t
        self.x = regret_matching_probs(avg, j, self.mu_)
        stay = self.x[self.slots, j]
        assert np.all(stay >= self.stay_floor - 1e-12), "stay probability below its bound"

    def describe(self):
        return f"{self.name}[mu={self.mu_:g}]"


@dataclass
class ModifiedRegretMatching(Rule):
    """Payoff-only regret matching with vanishing uniform exploration."""

    gamma: float = 0.2
    delta: float = 0.5
    mu: Optional[float] = None

    name = "modified-rm"
    info = InfoClass.COMPLETELY_UNCOUPLED

    def __post_init__(self):
        if not 0 < self.gamma < 0.25:
            raise RuleError(f"gamma must lie in (0, 1/4), got {self.gamma}")
        if not 0 < self.delta <= 1:
            raise RuleError(f"delta must lie in (0, 1], got {self.delta}")

    def reset(self):
        m, M = self.ctx.m, self.ctx.payoff_bound
        self.mu_ = 2 * M * m + 1 if self.mu is None else float(self.mu)
        if not self.mu_ > 2 * M * m:
            raise RuleError(f"mu must exceed 2*M*m = {2 * M * m}, got {self.mu_}")
        self.tally = EstimatedTally(m, self.ctx.runs)
        self.x = self.uniform_simplex(range(self.ctx.runs))

    def plan(self, t, L):
        return self.x, None

    def _observe(self, t, L, fb: PayoffFeedback):
        j = fb.actions[:, 0]
        self.tally.update(j, fb.payoffs[:, 0], self.x)
        est = self.tally.estimate()[self.slots, j]
        self.x = modified_rm_probs(est, j, self.mu_, self.delta, self.gamma, self.tally.t)

    def describe(self):
        return f"{self.name}[gamma={self.gamma:g},delta={self.delta:g},mu={self.mu_:g}]"
