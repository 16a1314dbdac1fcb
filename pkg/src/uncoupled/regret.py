"""Regret bookkeeping.

Array-level classes here carry a leading run axis ``R`` (independent runs
advanced in lockstep) and use 0-based actions. The module-level helpers that
take a :class:`~uncoupled.games.Game` and 1-based profiles are the single-run
convenience surface.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .games import Game, GameError

# Smallest probability the importance-weighted estimator will divide by.
MIN_PROB = 1e-12


class EstimatorGuardError(ValueError):
    """A mixed action put (near) zero weight on an action the estimator divides by."""


def own_lines(own_u: np.ndarray, i: int, profiles: np.ndarray) -> np.ndarray:
    """Player ``i``'s payoff for each own action against the realized opponents.

    ``own_u`` has shape ``(m_1, ..., m_n)``; ``profiles`` has shape ``(..., n)``
    with 0-based actions. Returns shape ``(..., m_i)``.
    """
    idx = [profiles[..., j] for j in range(profiles.shape[-1])]
    m_i = own_u.shape[i]
    idx[i] = np.arange(m_i)
    idx = [a[..., None] if j != i else a for j, a in enumerate(idx)]
    return own_u[tuple(idx)]


class RegretTally:
    """Cumulative and internal regret of one player across ``R`` runs.

    ``alt_sum[r, j]`` is the running sum of ``pi_i(j, s_-i)``, ``real_sum[r]``
    the running realized payoff, and ``internal[r, j, k]`` the internal regret
    for replacing past plays of ``j`` by ``k``.
    """

    def __init__(self, m: int, runs: int = 1):
        self.m = m
        self.runs = runs
        self.t = 0
        self.alt_sum = np.zeros((runs, m))
        self.real_sum = np.zeros(runs)
        self.internal = np.zeros((runs, m, m))

    def update(self, lines: np.ndarray, actions: np.ndarray) -> None:
        """Add periods with own-action payoff ``lines`` ``(R, [L,] m)`` and own ``actions``."""
        if lines.ndim == 2:
            rows = np.arange(self.runs)
            real = lines[rows, actions]
            self.alt_sum += lines
            self.real_sum += real
            self.internal[rows, actions] += lines - real[:, None]
            self.t += 1
            return
        real = np.take_along_axis(lines, actions[..., None], axis=-1)[..., 0]
        self.alt_sum += lines.sum(axis=1)
        self.real_sum += real.sum(axis=1)
        onehot = np.eye(self.m)[actions]
        self.internal += np.einsum("rlj,rlk->rjk", onehot, lines - real[..., None])
        self.t += lines.shape[1]

    @property
    def regret(self) -> np.ndarray:
        """Cumulative regret ``r_{t,j}``, shape ``(R, m)``."""
        return self.alt_sum - self.real_sum[:, None]

    def avg_internal(self, j=None, k=None) -> np.ndarray:
        if self.t == 0:
            raise ValueError("average internal regret undefined before the first period")
        avg = self.internal / self.t
        if j is None:
            return avg
        return avg[:, j, k]


class EstimatedTally:
    """Payoff-only estimate of average internal regret (importance weighted).

    ``weighted[r, j, k]`` accumulates ``x_j / x_k * payoff`` over periods where
    ``k`` was played; ``played[r, j]`` accumulates payoff over periods where
    ``j`` was played.
    """

    def __init__(self, m: int, runs: int = 1):
        self.m = m
        self.runs = runs
        self.t = 0
        self.weighted = np.zeros((runs, m, m))
        self.played = np.zeros((runs, m))

    def update(self, actions: np.ndarray, payoffs: np.ndarray, x: np.ndarray) -> None:
        """One period: own ``actions`` (R,), realized ``payoffs`` (R,), mixed actions ``x`` (R, m)."""
        if np.any(x < MIN_PROB):
            raise EstimatorGuardError(
                f"mixed action component below {MIN_PROB}; importance weights would blow up"
            )
        r = np.arange(self.runs)
        xk = x[r, actions]
        self.weighted[r, :, actions] += x * (payoffs / xk)[:, None]
        self.played[r, actions] += payoffs
        self.t += 1

    def estimate(self) -> np.ndarray:
        """Estimated average internal regret, shape ``(R, m, m)``."""
        if self.t == 0:
            raise ValueError("estimate undefined before the first period")
        return (self.weighted - self.played[:, :, None]) / self.t


class FrameSampler:
    """Exploration schedule for one frame: ``g`` forced slots per action.

    Values are 0 (play the mixed action) or ``h`` in ``1..m`` (play ``h``).
    """

    def __init__(self, T: int, g: int, m: int):
        if g < 1 or T < 1:
            raise ValueError("need T >= 1 and g >= 1")
        if g * m >= T:
            raise ValueError(f"g*m = {g * m} must be smaller than the frame length T = {T}")
        self.T, self.g, self.m = T, g, m
        self.template = np.concatenate(
            [np.repeat(np.arange(1, m + 1), g), np.zeros(T - g * m, dtype=int)]
        )

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        return rng.permutation(self.template)


def estimated_frame_regret(U: np.ndarray, payoffs: np.ndarray, g: int, m: int) -> np.ndarray:
    """Payoff-only frame regret from exploration schedule ``U`` and own payoffs.

    ``U`` and ``payoffs`` have shape ``(..., T)``; returns ``(..., m)``.
    """
    U = np.asarray(U)
    payoffs = np.asarray(payoffs, dtype=float)
    T = U.shape[-1]
    if g * m >= T:
        raise ValueError(f"g*m = {g * m} must be smaller than the frame length T = {T}")
    base = np.where(U == 0, payoffs, 0.0).sum(axis=-1) / (T - m * g)
    probe = np.stack(
        [np.where(U == h, payoffs, 0.0).sum(axis=-1) for h in range(1, m + 1)], axis=-1
    ) / g
    return probe - base[..., None]


# ---------------------------------------------------------------- single-run helpers

def _zero_based(game: Game, profiles) -> np.ndarray:
    p = np.asarray(profiles, dtype=int)
    if p.ndim == 1:
        p = p[None, :]
    if p.shape[-1] != game.n:
        raise GameError(f"profiles need {game.n} entries")
    if np.any(p < 1) or np.any(p > np.array(game.m)):
        raise GameError("action index out of range")
    return p - 1


def new_tally(game: Game, i: int) -> RegretTally:
    return RegretTally(game.m[i - 1], runs=1)


def update_tally(tally: RegretTally, game: Game, i: int, s: Sequence[int]) -> RegretTally:
    """Advance a single-run tally of player ``i`` by the 1-based profile ``s``."""
    p = _zero_based(game, s)
    k = i - 1
    tally.update(own_lines(game.u[..., k], k, p), p[:, k])
    return tally


def frame_avg_regret(game: Game, i: int, frame) -> np.ndarray:
    """Average regret of player ``i`` for each own action over a frame of 1-based profiles."""
    if len(frame) == 0:
        raise ValueError("empty frame")
    p = _zero_based(game, frame)
    k = i - 1
    lines = own_lines(game.u[..., k], k, p)
    real = lines[np.arange(len(p)), p[:, k]]
    return (lines - real[:, None]).mean(axis=0)
