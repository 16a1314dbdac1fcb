"""Finite normal-form games, builtin examples, the game file format and
equilibrium verifiers.

Public functions take 1-based action indices (player ``i`` picks from
``1..m_i``). Internally the payoff tensor is a numpy array ``u`` of shape
``(m_1, ..., m_n, n)`` indexed with 0-based actions. The flat profile order
used by files, joint distributions given as vectors, and the simulation
engine is lexicographic with player 1's index varying fastest
(Fortran order over the action axes).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Slack for comparisons on computed (not stored) payoff quantities.
NUM_TOL = 1e-12
# Probability vectors within this distance of 1 are accepted as-is.
DIST_TOL = 1e-9
# ... and within this one they are renormalized on load.
RENORM_TOL = 1e-6

MAX_INTERDEPENDENCE_PLAYERS = 20


class GameError(ValueError):
    """Invalid game, profile or distribution."""


class GameFormatError(GameError):
    """Malformed game document."""


class CapacityError(GameError):
    """Request too large for an exhaustive scan."""


@dataclass(frozen=True, eq=False)
class Game:
    """An ``n``-player finite game with dense payoff tensor ``u``."""

    u: np.ndarray
    name: str = ""
    bounds: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        if u.ndim < 3:
            raise GameError("payoff tensor needs at least two action axes plus a player axis")
        n = u.ndim - 1
        if u.shape[-1] != n:
            raise GameError(f"last axis must have length n={n}, got {u.shape[-1]}")
        if any(m < 2 for m in u.shape[:-1]):
            raise GameError(f"every player needs at least 2 actions, got {u.shape[:-1]}")
        if not np.all(np.isfinite(u)):
            raise GameError("payoffs must be finite")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        b = np.abs(u).reshape(-1, n).max(axis=0)
        b.setflags(write=False)
        object.__setattr__(self, "bounds", b)

    @property
    def n(self) -> int:
        return self.u.ndim - 1

    @property
    def m(self) -> tuple[int, ...]:
        return tuple(self.u.shape[:-1])

    @property
    def num_profiles(self) -> int:
        return math.prod(self.m)

    @property
    def flat_payoffs(self) -> np.ndarray:
        """Payoff rows in file order, shape ``(prod(m), n)``."""
        return np.stack([self.u[..., i].ravel(order="F") for i in range(self.n)], axis=1)

    def profiles(self) -> Iterable[tuple[int, ...]]:
        """All pure profiles (1-based) in file order."""
        for rev in itertools.product(*(range(1, k + 1) for k in reversed(self.m))):
            yield tuple(reversed(rev))

    def __eq__(self, other):
        if not isinstance(other, Game):
            return NotImplemented
        return self.u.shape == other.u.shape and bool(np.array_equal(self.u, other.u))

    def __hash__(self):
        return hash((self.u.shape, self.u.tobytes()))

    @classmethod
    def from_flat(cls, actions: Sequence[int], payoffs, name: str = "") -> "Game":
        """Build from payoff rows listed in file order."""
        actions = tuple(int(a) for a in actions)
        rows = np.asarray(payoffs, dtype=float)
        n = len(actions)
        expected = math.prod(actions)
        if rows.ndim != 2 or rows.shape != (expected, n):
            raise GameError(
                f"expected {expected} payoff vectors of length {n}, got shape {rows.shape}"
            )
        u = np.stack([rows[:, i].reshape(actions, order="F") for i in range(n)], axis=-1)
        return cls(u, name=name)

    @classmethod
    def bimatrix(cls, a, b, name: str = "") -> "Game":
        """Two-player game from row-player matrix ``a`` and column-player matrix ``b``."""
        return cls(np.stack([np.asarray(a, float), np.asarray(b, float)], axis=-1), name=name)


def _check_profile(game: Game, s: Sequence[int]) -> tuple[int, ...]:
    if len(s) != game.n:
        raise GameError(f"profile has {len(s)} entries, game has {game.n} players")
    idx = []
    for i, (a, m) in enumerate(zip(s, game.m)):
        if int(a) != a or not 1 <= a <= m:
            raise GameError(f"action {a!r} of player {i + 1} is outside 1..{m}")
        idx.append(int(a) - 1)
    return tuple(idx)


def _check_player(game: Game, i: int) -> int:
    if not 1 <= i <= game.n:
        raise GameError(f"player {i} is outside 1..{game.n}")
    return i - 1


def check_mixed_action(x, m: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (m,):
        raise GameError(f"mixed action must have length {m}, got shape {x.shape}")
    if np.any(x < 0) or abs(x.sum() - 1.0) > DIST_TOL:
        raise GameError(f"not a probability vector: {x}")
    return x


def check_mixed_profile(game: Game, x) -> list[np.ndarray]:
    if len(x) != game.n:
        raise GameError(f"mixed profile has {len(x)} entries, game has {game.n} players")
    return [check_mixed_action(xi, m) for xi, m in zip(x, game.m)]


def as_joint(game: Game, q, renormalize: bool = False) -> np.ndarray:
    """Validate a joint distribution; returns it shaped ``game.m``.

    A flat vector is read in file order. With ``renormalize`` a total within
    ``RENORM_TOL`` of one is rescaled instead of rejected.
    """
    q = np.array(q, dtype=float)
    if q.shape == (game.num_profiles,):
        q = q.reshape(game.m, order="F")
    if q.shape != game.m:
        raise GameError(f"joint distribution has shape {q.shape}, expected {game.m}")
    if np.any(q < 0) or not np.all(np.isfinite(q)):
        raise GameError("joint distribution has negative or non-finite entries")
    total = q.sum()
    if abs(total - 1.0) > DIST_TOL:
        if renormalize and abs(total - 1.0) <= RENORM_TOL:
            q = q / total
        else:
            raise GameError(f"joint distribution sums to {total:.12g}, not 1")
    return q


def product_distribution(x: Sequence[np.ndarray]) -> np.ndarray:
    q = np.asarray(x[0], dtype=float)
    for xi in x[1:]:
        q = np.multiply.outer(q, np.asarray(xi, dtype=float))
    return q


def point_mass(game: Game, s: Sequence[int]) -> np.ndarray:
    q = np.zeros(game.m)
    q[_check_profile(game, s)] = 1.0
    return q


def payoff(game: Game, s: Sequence[int]) -> np.ndarray:
    return game.u[_check_profile(game, s)].copy()


def social_welfare(game: Game, s: Sequence[int]) -> float:
    return float(game.u[_check_profile(game, s)].sum())


def expected_payoff(game: Game, x, i: int) -> float:
    """Expected payoff of player ``i`` under the independent mixed profile ``x``."""
    k = _check_player(game, i)
    x = check_mixed_profile(game, x)
    return float(np.sum(product_distribution(x) * game.u[..., k]))


def _own_payoff_line(game: Game, k: int, s_minus_i: Sequence[int]) -> np.ndarray:
    """Payoffs of player ``k`` (0-based) over own actions at fixed opponents."""
    if len(s_minus_i) != game.n - 1:
        raise GameError(f"expected {game.n - 1} opponent actions, got {len(s_minus_i)}")
    full = list(s_minus_i[:k]) + [1] + list(s_minus_i[k:])
    idx = list(_check_profile(game, full))
    idx[k] = slice(None)
    return game.u[tuple(idx) + (k,)]


def best_reply_set(game: Game, i: int, s_minus_i: Sequence[int]) -> set[int]:
    k = _check_player(game, i)
    line = _own_payoff_line(game, k, s_minus_i)
    return {int(a) + 1 for a in np.flatnonzero(line == line.max())}


def is_eps_best_reply(game: Game, i: int, s_i: int, s_minus_i: Sequence[int], eps: float) -> bool:
    if eps < 0:
        raise GameError(f"eps must be nonnegative, got {eps}")
    k = _check_player(game, i)
    line = _own_payoff_line(game, k, s_minus_i)
    if not 1 <= s_i <= game.m[k]:
        raise GameError(f"action {s_i} of player {i} is outside 1..{game.m[k]}")
    return bool(line[s_i - 1] >= line.max() - eps)


def is_pure_nash(game: Game, s: Sequence[int], eps: float = 0.0) -> bool:
    _check_profile(game, s)
    s = list(s)
    return all(
        is_eps_best_reply(game, i + 1, s[i], s[:i] + s[i + 1:], eps) for i in range(game.n)
    )


def pure_nash_profiles(game: Game) -> list[tuple[int, ...]]:
    return [s for s in game.profiles() if is_pure_nash(game, s)]


def deviation_gains(game: Game, x) -> np.ndarray:
    """Per player, best pure deviation payoff minus the current expected payoff."""
    x = check_mixed_profile(game, x)
    gains = np.empty(game.n)
    for k in range(game.n):
        # expected payoff of each own pure action against the others' mixture
        vals = np.moveaxis(game.u[..., k], k, -1)
        for j, xj in enumerate(x):
            if j != k:
                # contract leading axis (player j) after moving k to the end
                vals = np.tensordot(xj, vals, axes=(0, 0))
        gains[k] = vals.max() - float(vals @ x[k])
    return gains


def is_mixed_eps_nash(game: Game, x, eps: float = 0.0) -> bool:
    if eps < 0:
        raise GameError(f"eps must be nonnegative, got {eps}")
    return bool(np.all(deviation_gains(game, x) <= eps + NUM_TOL))


def ce_gains(game: Game, q) -> list[np.ndarray]:
    """Internal-deviation gains under ``q``.

    Entry ``[k][j, j2]`` is the sum over profiles with ``s_k = j`` of
    ``q(s) * (u_k(j2, s_-k) - u_k(s))`` (0-based ``k, j, j2``).
    """
    q = as_joint(game, q)
    out = []
    for k in range(game.n):
        qk = np.moveaxis(q, k, 0).reshape(game.m[k], -1)
        uk = np.moveaxis(game.u[..., k], k, 0).reshape(game.m[k], -1)
        cross = qk @ uk.T
        out.append(cross - np.diag(cross)[:, None])
    return out


def min_ce_eps(game: Game, q) -> float:
    """Smallest eps for which ``q`` is a correlated eps-equilibrium."""
    worst = max(float(g.max()) for g in ce_gains(game, q))
    return max(worst, 0.0)


def is_correlated_eps_eq(game: Game, q, eps: float = 0.0) -> bool:
    if eps < 0:
        raise GameError(f"eps must be nonnegative, got {eps}")
    return all(bool(np.all(g <= eps + NUM_TOL)) for g in ce_gains(game, q))


def is_interdependent(game: Game) -> bool:
    """Every nonempty proper coalition can move some outsider's payoff."""
    n = game.n
    if n > MAX_INTERDEPENDENCE_PLAYERS:
        raise CapacityError(
            f"interdependence scan over 2^{n} coalitions refused (limit {MAX_INTERDEPENDENCE_PLAYERS})"
        )
    for size in range(1, n):
        for coalition in itertools.combinations(range(n), size):
            influenced = False
            for i in range(n):
                if i in coalition:
                    continue
                ui = game.u[..., i]
                spread = ui.max(axis=coalition) - ui.min(axis=coalition)
                if np.any(spread != 0):
                    influenced = True
                    break
            if not influenced:
                return False
    return True


def is_generic(game: Game, tol: float) -> bool:
    """No two own actions give a player payoffs within ``tol`` at any opponents' profile."""
    if tol <= 0:
        raise GameError(f"tol must be positive, got {tol}")
    for k in range(game.n):
        line = np.sort(game.u[..., k], axis=k)
        if np.any(np.diff(line, axis=k) <= tol):
            return False
    return True


def ce_time_bound(n: int, m: Sequence[int], eps: float, delta: float) -> float:
    """max_i 16 m_i n / eps^2 * log(m_i n / delta)."""
    if n < 2:
        raise GameError(f"need at least 2 players, got n={n}")
    if len(m) != n or any(int(k) != k or k < 1 for k in m):
        raise GameError(f"action counts {m!r} do not match n={n}")
    if not (0 < eps < 1 and 0 < delta < 1):
        raise GameError(f"eps and delta must lie in (0, 1), got eps={eps}, delta={delta}")
    return max(16 * mi * n / eps**2 * math.log(mi * n / delta) for mi in m)


# ---------------------------------------------------------------- builtins

def matching_pennies() -> Game:
    a = np.array([[1, -1], [-1, 1]])
    return Game.bimatrix(a, -a, name="matching_pennies")


def entry_deterrence() -> Game:
    return Game.bimatrix([[2, 0], [1, 1]], [[2, 0], [4, 4]], name="entry_deterrence")


def battle_of_sexes() -> Game:
    return Game.bimatrix([[3, 0], [0, 2]], [[2, 0], [0, 3]], name="battle_of_sexes")


def coordination() -> Game:
    return Game.bimatrix([[2, 0], [0, 1]], [[2, 0], [0, 1]], name="coordination")


def random_game(
    n: int = 2,
    m: Sequence[int] | int = 2,
    seed: int = 0,
    lo: float = 0.0,
    hi: float = 1.0,
    generic_tol: float = 1e-9,
    max_tries: int = 1000,
) -> Game:
    """I.i.d. uniform payoffs on ``[lo, hi]``, redrawn until generic."""
    if isinstance(m, int):
        m = (m,) * n
    m = tuple(m)
    if len(m) != n:
        raise GameError(f"action counts {m} do not match n={n}")
    if not hi > lo:
        raise GameError("need hi > lo")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        g = Game(rng.uniform(lo, hi, size=m + (n,)), name=f"random_{seed}")
        if is_generic(g, generic_tol):
            return g
    raise GameError("could not draw a generic game")


BUILTINS = {
    "matching_pennies": matching_pennies,
    "entry_deterrence": entry_deterrence,
    "battle_of_sexes": battle_of_sexes,
    "coordination": coordination,
}


def builtin(name: str, **kwargs) -> Game:
    key = name.replace("-", "_").lower()
    if key == "random":
        return random_game(**kwargs)
    if key not in BUILTINS:
        raise GameError(f"unknown builtin game {name!r}; known: {sorted(BUILTINS) + ['random']}")
    return BUILTINS[key]()


# ---------------------------------------------------------------- file format

def _fmt_number(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def save_game(game: Game) -> str:
    """Serialize to the JSON game document (one payoff vector per line)."""
    rows = [
        "[" + ", ".join(_fmt_number(v) for v in row) + "]" for row in game.flat_payoffs
    ]
    head = []
    if game.name:
        head.append(f'  "name": {json.dumps(game.name)},')
    head.append(f'  "players": {game.n},')
    head.append(f'  "actions": [{", ".join(str(k) for k in game.m)}],')
    body = ",\n    ".join(rows)
    return "{\n" + "\n".join(head) + f'\n  "payoffs": [\n    {body}\n  ]\n' + "}\n"


def load_game(text: str) -> Game:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GameFormatError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise GameFormatError("game document must be a JSON object")
    unknown = set(doc) - {"name", "players", "actions", "payoffs"}
    if unknown:
        raise GameFormatError(f"unknown field(s): {sorted(unknown)}")
    for key in ("players", "actions", "payoffs"):
        if key not in doc:
            raise GameFormatError(f"missing field {key!r}")
    n = doc["players"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise GameFormatError(f"field 'players': expected integer >= 2, got {n!r}")
    actions = doc["actions"]
    if (
        not isinstance(actions, list)
        or len(actions) != n
        or not all(isinstance(a, int) and not isinstance(a, bool) and a >= 2 for a in actions)
    ):
        raise GameFormatError(f"field 'actions': expected {n} integers >= 2, got {actions!r}")
    payoffs = doc["payoffs"]
    expected = math.prod(actions)
    if not isinstance(payoffs, list) or len(payoffs) != expected:
        got = len(payoffs) if isinstance(payoffs, list) else type(payoffs).__name__
        raise GameFormatError(f"field 'payoffs': expected {expected} entries, got {got}")
    for r, row in enumerate(payoffs):
        if (
            not isinstance(row, list)
            or len(row) != n
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in row)
        ):
            raise GameFormatError(f"field 'payoffs', entry {r}: expected {n} numbers, got {row!r}")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise GameFormatError("field 'name' must be a string")
    try:
        return Game.from_flat(actions, payoffs, name=name)
    except GameError as e:
        raise GameFormatError(str(e)) from None
