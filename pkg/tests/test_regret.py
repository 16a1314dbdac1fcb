import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uncoupled import games as G
from uncoupled import regret as Rg

import oracles

MP = G.matching_pennies()
ED = G.entry_deterrence()


def _history(game, length, rng):
    return [tuple(int(rng.integers(1, k + 1)) for k in game.m) for _ in range(length)]


def _tally(game, i, history):
    tally = Rg.new_tally(game, i)
    for s in history:
        Rg.update_tally(tally, game, i, s)
    return tally


def test_first_period_example():
    tally = _tally(MP, 1, [(1, 1)])
    assert tally.regret[0].tolist() == [0, -2]


def test_constant_play_zero_regret_for_played_action():
    tally = _tally(ED, 1, [(2, 1), (2, 2), (2, 1)])
    assert tally.regret[0, 1] == 0
    tally = _tally(ED, 1, [(2, 1), (1, 2)])
    assert tally.regret[0, 1] != 0


def test_avg_internal_examples():
    tally = _tally(ED, 1, [(1, 1)])
    # player 1 never played action 2: empty sum
    assert tally.avg_internal(1, 0)[0] == 0
    # single period, played 1 against column 1; switching to 2 loses 1
    assert tally.avg_internal(0, 1)[0] == -1
    with pytest.raises(ValueError):
        Rg.new_tally(ED, 1).avg_internal(0, 1)


def test_tally_matches_oracle_on_random_10_period_history():
    rng = np.random.default_rng(0)
    g = G.random_game(2, (3, 2), seed=1)
    hist = _history(g, 10, rng)
    r, R = oracles.regrets(g.u, g.m, 1, hist)
    tally = _tally(g, 1, hist)
    np.testing.assert_allclose(tally.regret[0], r, atol=1e-9)
    np.testing.assert_allclose(tally.internal[0], R, atol=1e-9)


def test_tally_oracle_500_histories():
    rng = np.random.default_rng(1)
    for k in range(500):
        m = [(2, 2), (3, 2), (2, 2, 2), (3, 3)][k % 4]
        integral = k % 2 == 0
        u = rng.integers(-5, 6, size=m + (len(m),)) if integral else rng.uniform(-5, 5, size=m + (len(m),))
        g = G.Game(u.astype(float))
        hist = _history(g, int(rng.integers(1, 40)), rng)
        i = int(rng.integers(1, g.n + 1))
        r, R = oracles.regrets(g.u, g.m, i, hist)
        tally = _tally(g, i, hist)
        if integral:
            assert tally.regret[0].tolist() == r
            assert tally.internal[0].tolist() == R
        else:
            np.testing.assert_allclose(tally.regret[0], r, atol=1e-9)
            np.testing.assert_allclose(tally.internal[0], R, atol=1e-9)


def test_block_update_equals_period_updates():
    rng = np.random.default_rng(2)
    g = G.random_game(2, (3, 3), seed=2)
    hist = np.array(_history(g, 50, rng)) - 1
    lines = Rg.own_lines(g.u[..., 0], 0, hist)
    a = Rg.RegretTally(3)
    a.update(lines[None], hist[None, :, 0])
    b = Rg.RegretTally(3)
    for k in range(50):
        b.update(lines[None, k], hist[None, k, 0])
    np.testing.assert_allclose(a.internal, b.internal, atol=1e-12)
    np.testing.assert_allclose(a.regret, b.regret, atol=1e-12)
    assert a.t == b.t == 50


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(2, 2), (3, 2), (2, 3, 2)]), st.integers(1, 30))
def test_internal_decomposition(seed, m, length):
    rng = np.random.default_rng(seed)
    g = G.Game(rng.integers(-4, 5, size=m + (len(m),)).astype(float))
    hist = _history(g, length, rng)
    tally = _tally(g, 1, hist)
    R = tally.internal[0]
    assert np.all(np.diag(R) == 0)
    # r_j = sum over source actions j' of R(j', j)
    np.testing.assert_allclose(tally.regret[0], R.sum(axis=0), atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_regret_invariant_to_opponent_relabeling(seed):
    rng = np.random.default_rng(seed)
    g = G.Game(rng.integers(-4, 5, size=(2, 3, 2)).astype(float))
    hist = _history(g, 20, rng)
    perm = rng.permutation(3)  # new label of old opponent action a is perm[a-1]+1
    u = np.empty_like(g.u)
    u[:, perm] = g.u
    h = G.Game(u)
    hist_h = [(s[0], int(perm[s[1] - 1]) + 1) for s in hist]
    a, b = _tally(g, 1, hist), _tally(h, 1, hist_h)
    np.testing.assert_array_equal(a.internal, b.internal)
    np.testing.assert_array_equal(a.regret, b.regret)


# ---------------------------------------------------------------- estimated tally

def test_estimator_single_period_example():
    est = Rg.EstimatedTally(2)
    est.update(np.array([1]), np.array([1.0]), np.array([[0.5, 0.5]]))
    e = est.estimate()[0]
    assert e[0, 1] == 1.0
    assert e[0, 0] == 0 and e[1, 1] == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_estimator_diagonal_zero(seed):
    rng = np.random.default_rng(seed)
    est = Rg.EstimatedTally(3)
    for _ in range(20):
        x = rng.dirichlet(np.ones(3)) * 0.9 + 0.1 / 3
        est.update(np.array([rng.integers(3)]), np.array([rng.normal()]), x[None])
    np.testing.assert_allclose(np.diag(est.estimate()[0]), 0, atol=1e-12)


def test_estimator_guard():
    est = Rg.EstimatedTally(2)
    with pytest.raises(Rg.EstimatorGuardError):
        est.update(np.array([0]), np.array([1.0]), np.array([[1.0, 0.0]]))


# ---------------------------------------------------------------- frames

def test_frame_avg_regret_examples():
    # constant frame at a pure NE: every regret <= 0
    assert np.all(Rg.frame_avg_regret(ED, 1, [(1, 1)] * 5) <= 0)
    assert np.all(Rg.frame_avg_regret(ED, 2, [(1, 1)] * 5) <= 0)
    # T = 1 reduces to the single-period regret
    single = _tally(ED, 2, [(1, 2)]).regret[0]
    np.testing.assert_array_equal(Rg.frame_avg_regret(ED, 2, [(1, 2)]), single)
    with pytest.raises(ValueError, match="empty"):
        Rg.frame_avg_regret(ED, 1, [])


def test_frame_avg_regret_oracle():
    rng = np.random.default_rng(3)
    for _ in range(100):
        g = G.Game(rng.uniform(-3, 3, size=(3, 2, 2)))
        frame = _history(g, int(rng.integers(1, 25)), rng)
        r, _ = oracles.regrets(g.u, g.m, 2, frame)
        np.testing.assert_allclose(Rg.frame_avg_regret(g, 2, frame), np.array(r) / len(frame), atol=1e-12)


def test_estimated_frame_regret_examples():
    U = np.array([1, 2, 0])
    assert Rg.estimated_frame_regret(U, np.array([5.0, 1.0, 2.0]), 1, 2).tolist() == [3, -1]
    assert np.all(Rg.estimated_frame_regret(U, np.full(3, 7.0), 1, 2) == 0)
    with pytest.raises(ValueError):
        Rg.estimated_frame_regret(U, np.ones(3), 2, 2)


def test_frame_sampler_counts_and_errors():
    s = Rg.FrameSampler(20, 3, 4)
    U = s.draw(np.random.default_rng(0))
    assert sorted(np.bincount(U, minlength=5).tolist()) == sorted([8, 3, 3, 3, 3])
    assert np.bincount(U, minlength=5)[0] == 8
    with pytest.raises(ValueError):
        Rg.FrameSampler(8, 2, 4)


def test_frame_sampler_equiprobable():
    s = Rg.FrameSampler(3, 1, 2)
    rng = np.random.default_rng(4)
    counts = {}
    for _ in range(6000):
        key = tuple(s.draw(rng))
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 6
    assert all(abs(c - 1000) < 150 for c in counts.values())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.floats(-10, 10))
def test_estimated_frame_regret_constant_is_zero(seed, c):
    U = Rg.FrameSampler(30, 2, 3).draw(np.random.default_rng(seed))
    np.testing.assert_allclose(Rg.estimated_frame_regret(U, np.full(30, c), 2, 3), 0, atol=1e-9)
