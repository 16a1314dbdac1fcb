"""Frame-based regret testing: experimental, annealed-localized, payoff-based.

Each rule holds its mixed action fixed over a frame of ``T`` periods, averages
its regrets over the frame and then decides whether to keep or redraw.
Decision codes (see ``TRIGGERS``) are logged per frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..regret import FrameSampler
from .base import InfoClass, PayoffFeedback, Rule, RuleError, UncoupledFeedback, sample_box_simplex

KEEP, LAMBDA, REGRET, MID_GLOBAL, LOCAL = range(5)
TRIGGERS = ("keep", "lambda", "regret", "mid-global", "local")
GLOBAL_CODES = (LAMBDA, REGRET, MID_GLOBAL)


def ert_decision(frame_regret: np.ndarray, rho: float, lam: float, coin: np.ndarray) -> np.ndarray:
    """Keep (0), lambda redraw (1) or regret-triggered redraw (2), per run."""
    high = np.any(frame_regret >= rho, axis=-1)
    return np.where(high, REGRET, np.where(coin < lam, LAMBDA, KEEP))


@dataclass(frozen=True)
class AlertSchedule:
    """Annealed parameters of regime ``l`` with ``eps_l = 2**-l``."""

    l: int

    def __post_init__(self):
        if self.l < 1:
            raise RuleError("regimes are numbered from 1")

    @property
    def eps(self) -> float:
        return 2.0 ** -self.l

    @property
    def lam(self) -> float:
        return self.eps ** self.l

    @property
    def rho(self) -> float:
        return self.lam + self.eps

    @property
    def T(self) -> int:
        # log(lam_l ** l) = l * log(lam_l)
        return math.ceil(-self.l * math.log(self.lam) / (2 * self.lam**2))

    @property
    def M(self) -> int:
        return 2 * math.ceil(math.log(2 / self.eps) / -math.log1p(-self.lam))

    @property
    def high(self) -> float:
        """Threshold above which a global redraw is forced."""
        return self.eps ** (2 / 3)

    @property
    def radius(self) -> float:
        return math.sqrt(self.eps)

    @property
    def bands_ordered(self) -> bool:
        return self.rho < self.high


def alert_decision(
    rbar: np.ndarray, sched: AlertSchedule, coin: np.ndarray, had_global: np.ndarray
) -> np.ndarray:
    """Branch per run from the maximal frame regret ``rbar``.

    When ``rho >= eps**(2/3)`` the middle band is empty and skipped.
    """
    high = rbar >= sched.high
    mid = ~high & (rbar >= sched.rho)
    low = ~high & ~mid
    out = np.full(rbar.shape, KEEP)
    out[high] = REGRET
    out[mid & had_global] = MID_GLOBAL
    out[mid & ~had_global] = LOCAL
    out[low & (coin < sched.lam)] = LAMBDA
    return out


class _FrameRule(Rule):
    """Shared frame plumbing: position tracking, redraws, frame log."""

    def _frame_reset(self):
        R = self.ctx.runs
        self.pos = 0
        self.x = self.uniform_simplex(range(R))
        self._log = {"x": [], "regret": [], "code": [], "end": []}

    def frame_length(self) -> int:
        raise NotImplementedError

    def block_len(self, t):
        return self.frame_length() - self.pos

    def plan(self, t, L):
        return self.x, None

    def _redraw(self, codes: np.ndarray, t_end: int, center=None, radius=None):
        for r in np.flatnonzero(codes != KEEP):
            code = int(codes[r])
            if code == LOCAL:
                self.x[r] = sample_box_simplex(self.ctx.event_rngs[r], center[r], radius)
            else:
                self.x[r] = self.ctx.event_rngs[r].dirichlet(np.ones(self.ctx.m))
            self.events.append((int(r), t_end, TRIGGERS[code]))

    def _log_frame(self, x, regret, codes, t_end, **extra):
        self._log["x"].append(x.copy())
        self._log["regret"].append(regret.copy())
        self._log["code"].append(codes.copy())
        self._log["end"].append(np.full(self.ctx.runs, t_end))
        for k, v in extra.items():
            self._log.setdefault(k, []).append(np.asarray(v).copy())

    def frame_log(self):
        if not self._log["x"]:
            return {k: np.empty((0, self.ctx.runs)) for k in self._log}
        return {k: np.stack(v) for k, v in self._log.items()}


class _RegretFrameRule(_FrameRule):
    """Accumulates exact frame regrets from the observed profiles."""

    def _acc_reset(self):
        R, m = self.ctx.runs, self.ctx.m
        self.alt = np.zeros((R, m))
        self.real = np.zeros(R)

    def _observe(self, t, L, fb: UncoupledFeedback):
        p = fb.profiles
        lines = self.own_lines(p)
        self.alt += lines.sum(axis=1)
        own = p[..., self.ctx.player]
        self.real += np.take_along_axis(lines, own[..., None], axis=-1)[..., 0].sum(axis=1)
        self.pos += L
        if self.pos == self.frame_length():
            T = self.frame_length()
            regret = (self.alt - self.real[:, None]) / T
            self._end_frame(regret, t + L - 1)
            self.pos = 0
            self._acc_reset()


@dataclass
class ExperimentalRegretTesting(_RegretFrameRule):
    """Redraw after a frame whose average regret reaches ``rho``; else redraw w.p. ``lam``.

    ``lam=0`` gives plain regret testing.
    """

    T: int = 10_000
    rho: float = 0.12
    lam: float = 1e-3

    name = "ert"
    info = InfoClass.UNCOUPLED

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise RuleError(f"T must be a positive integer, got {self.T}")
        self.T = int(self.T)
        if not self.rho > 0:
            raise RuleError(f"rho must be positive, got {self.rho}")
        if not 0 <= self.lam < 1:
            raise RuleError(f"lambda must lie in [0, 1), got {self.lam}")

    def reset(self):
        self._frame_reset()
        self._acc_reset()

    def frame_length(self):
        return self.T

    def _end_frame(self, regret, t_end):
        coin = self.ctx.coins.take1()
        codes = ert_decision(regret, self.rho, self.lam, coin)
        self._log_frame(self.x, regret, codes, t_end)
        self._redraw(codes, t_end)

    def describe(self):
        return f"{self.name}[T={self.T},rho={self.rho:g},lambda={self.lam:g}]"


class _AlertMixin:
    """Regime bookkeeping shared by the exact and payoff-based variants."""

    def _regime_reset(self, start: int):
        R = self.ctx.runs
        self.sched = AlertSchedule(start)
        self.frames_in_regime = 0
        self.center = self.x.copy()
        self.had_global = np.zeros(R, dtype=bool)

    def frame_length(self):
        return self.sched.T

    def _alert_end_frame(self, regret, t_end):
        coin = self.ctx.coins.take1()
        rbar = regret.max(axis=1)
        codes = alert_decision(rbar, self.sched, coin, self.had_global)
        played = self.x.copy()
        self._log_frame(played, regret, codes, t_end, regime=np.full(self.ctx.runs, self.sched.l))
        self._redraw(codes, t_end, center=self.center, radius=self.sched.radius)
        self.had_global |= np.isin(codes, GLOBAL_CODES)
        self.frames_in_regime += 1
        if self.frames_in_regime >= self.sched.M:
            self._advance(played)

    def _advance(self, played):
        self.sched = AlertSchedule(self.sched.l + 1)
        self.frames_in_regime = 0
        self.center = played
        self.had_global[:] = False


@dataclass
class Alert(_AlertMixin, _RegretFrameRule):
    """Annealed localized experimental regret testing with ``eps_l = 2**-l``."""

    start_regime: int = 1

    name = "alert"
    info = InfoClass.UNCOUPLED

    def reset(self):
        self._frame_reset()
        self._acc_reset()
        self._regime_reset(self.start_regime)

    def _end_frame(self, regret, t_end):
        self._alert_end_frame(regret, t_end)

    def describe(self):
        return f"{self.name}[start={self.start_regime}]"


@dataclass
class PayoffAlert(_AlertMixin, _FrameRule):
    """ALERT driven by payoff-only regret estimates from forced exploration slots.

    ``start_regime=None`` picks the first regime whose frame holds ``2*g*m``
    periods.
    """

    g: int = 25
    start_regime: Optional[int] = None

    name = "payoff-alert"
    info = InfoClass.COMPLETELY_UNCOUPLED

    def __post_init__(self):
        if int(self.g) != self.g or self.g < 1:
            raise RuleError(f"g must be a positive integer, got {self.g}")
        self.g = int(self.g)

    def _check_capacity(self, sched: AlertSchedule):
        if self.g * self.ctx.m > sched.T / 2:
            raise RuleError(
                f"g*m = {self.g * self.ctx.m} exceeds half the regime-{sched.l} frame ({sched.T})"
            )

    def reset(self):
        self._frame_reset()
        start = self.start_regime
        if start is None:
            start = 1
            while self.g * self.ctx.m > AlertSchedule(start).T / 2:
                start += 1
        self._check_capacity(AlertSchedule(start))
        self._regime_reset(start)
        self._new_frame()

    def _advance(self, played):
        super()._advance(played)
        self._check_capacity(self.sched)

    def _new_frame(self):
        R, m = self.ctx.runs, self.ctx.m
        sampler = FrameSampler(self.sched.T, self.g, m)
        self.U = np.stack([sampler.draw(self.ctx.event_rngs[r]) for r in range(R)]).astype(np.int32)
        self.base = np.zeros(R)
        self.probe = np.zeros((R, m))

    def plan(self, t, L):
        return self.x, self.U[:, self.pos:self.pos + L] - 1

    def _observe(self, t, L, fb: PayoffFeedback):
        u = self.U[:, self.pos:self.pos + L]
        pay = fb.payoffs
        self.base += np.where(u == 0, pay, 0.0).sum(axis=1)
        for h in range(self.ctx.m):
            self.probe[:, h] += np.where(u == h + 1, pay, 0.0).sum(axis=1)
        self.pos += L
        T = self.sched.T
        if self.pos == T:
            regret = self.probe / self.g - (self.base / (T - self.ctx.m * self.g))[:, None]
            self._alert_end_frame(regret, t + L - 1)
            self.pos = 0
            self._new_frame()

    def describe(self):
        return f"{self.name}[g={self.g},start={self.sched.l if hasattr(self, 'sched') else self.start_regime}]"
