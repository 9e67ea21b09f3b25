from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wmp.classical import (
    mp_threshold_win,
    mp_value,
    neg_sup_tp,
    tp_sup_win,
    tp_sup_win_p2_view,
    uniform_tp_strategy,
)
from wmp.model import (
    Lasso,
    ObjectiveKind as K,
    ObjectiveSpec as S,
    P2,
    ResourceLimitError,
    eval_lasso,
    normalize_threshold,
)
from wmp.testkit import GenSpec, gen_random_game, oracle_classical
from wmp.window1d import good_win, sufficient_window

from conftest import small_games


class TestMeanPayoff:
    def test_fixtures(self, g1, g2):
        assert mp_value(g1) == {"a": Fraction(0)}
        assert mp_value(g2) == {"a": Fraction(-1)}

    def test_fix4_best_cycle_mean(self, g4):
        values = mp_value(g4)
        assert values["s"] == Fraction(2, 3)
        # one-player arena: every state eventually joins the best cycle
        assert set(values.values()) == {Fraction(2, 3)}

    def test_threshold_sets(self, g2, g3, g4):
        assert mp_threshold_win(g3) == frozenset(g3.names)
        assert mp_threshold_win(g2) == frozenset()
        assert mp_threshold_win(g4) == frozenset(g4.names)

    def test_needs_one_dimension(self, g5):
        with pytest.raises(ValueError):
            mp_value(g5)

    @settings(max_examples=40, deadline=None)
    @given(small_games(max_states=4, max_weight=2))
    def test_matches_oracle(self, g):
        assert mp_threshold_win(g) == oracle_classical(g, K.MEAN_INF)
        assert mp_threshold_win(g) == oracle_classical(g, K.MEAN_SUP)


class TestTotalPayoff:
    def test_fixtures(self, g1, g2, g6):
        assert tp_sup_win(g1) == frozenset({"a"})
        assert tp_sup_win(g2) == frozenset()
        assert tp_sup_win(g6) == frozenset({"b"})
        assert neg_sup_tp(g2) == frozenset({"a"})
        assert neg_sup_tp(g1) == frozenset()

    def test_fix3_split(self, g3):
        assert tp_sup_win(g3) == frozenset({"c", "y1", "y2"})
        assert neg_sup_tp(g3) == frozenset({"x"})

    def test_budget_guard(self):
        g = gen_random_game(GenSpec(states=5, seed=1))
        with pytest.raises(ResourceLimitError):
            tp_sup_win(g, budget=4)

    def test_uniform_strategy_exists(self, g4):
        moves = uniform_tp_strategy(g4)
        assert moves["s"] == "a1"  # the positive-mean cycle

    @settings(max_examples=40, deadline=None)
    @given(small_games(max_states=4, max_weight=2))
    def test_matches_oracle(self, g):
        assert tp_sup_win(g) == oracle_classical(g, K.TOTAL_SUP)

    @settings(max_examples=40, deadline=None)
    @given(small_games(max_states=4, max_weight=2))
    def test_both_enumeration_directions_agree(self, g):
        assert tp_sup_win(g) == tp_sup_win_p2_view(g)


class TestLemma1Equivalences:
    """One-dimension equivalences between mean-payoff winnability and
    total-payoff winnability at some finite threshold."""

    @settings(max_examples=40, deadline=None)
    @given(small_games(max_states=4, max_weight=1))
    def test_four_way_equivalence(self, g):
        mp = mp_threshold_win(g)
        bound = Fraction(-2 * (g.n - 1) * g.max_abs_weight)
        assert oracle_classical(g, K.TOTAL_INF, bound) == mp
        assert oracle_classical(g, K.TOTAL_SUP, bound) == mp

    @settings(max_examples=30, deadline=None)
    @given(small_games(max_states=4, max_weight=1))
    def test_infinite_total_value_iff_positive_mean(self, g):
        strictly_pos = frozenset(s for s, v in mp_value(g).items() if v > 0)
        big = 2 * (g.n - 1) * g.max_abs_weight + 1
        assert oracle_classical(g, K.TOTAL_SUP, big) == strictly_pos

    def test_threshold_shift_through_normalization(self, g1):
        # the initial-edge construction answers the init-state query
        big = 1
        shifted = normalize_threshold(g1, [big], "total")
        assert shifted.init not in tp_sup_win(shifted)
        ok = normalize_threshold(g1, [0], "total")
        assert ok.init in tp_sup_win(ok)


class TestNeverClosingWitness:
    """For every state P2 wins, some memoryless P2 strategy forces every
    consistent lasso to carry a window that never closes."""

    @settings(max_examples=20, deadline=None)
    @given(small_games(max_states=3, max_weight=1))
    def test_lemma_nine_shape(self, g):
        import itertools

        losing = neg_sup_tp(g)
        if not losing:
            return
        p2_states = [s for s in range(g.n) if g.owner[s] == P2]
        options = [range(len(g.succ[s])) for s in p2_states]
        for start_name in losing:
            start = g.index[start_name]
            found = False
            for picks in itertools.product(*options):
                fixed = {s: g.succ[s][c][0] for s, c in zip(p2_states, picks)}
                if all(
                    eval_lasso(g, lasso, S(K.DIR_BND)) is False
                    for lasso in _consistent_lassos(g, start, fixed)
                ):
                    found = True
                    break
            assert found, f"no spoiling memoryless strategy from {start_name}"


def _consistent_lassos(g, start, fixed, limit=4000):
    """All simple-stem simple-cycle lassos from start where the given
    states' successors are pinned."""
    out = []

    def options(v):
        if v in fixed:
            return [fixed[v]]
        return [t for t, _ in g.succ[v]]

    def extend(path):
        if len(out) >= limit:
            return
        v = path[-1]
        for t in options(v):
            if t in path:
                cut = path.index(t)
                out.append(
                    Lasso.build(
                        [g.names[i] for i in path[:cut]],
                        [g.names[i] for i in path[cut:]],
                    )
                )
            else:
                extend(path + [t])

    extend([start])
    return out


class TestLemma8Inclusion:
    @settings(max_examples=30, deadline=None)
    @given(small_games(max_states=4, max_weight=2))
    def test_tp_winners_close_a_window(self, g):
        star = sufficient_window(g)
        winners = frozenset(g.names[s] for s in good_win(g, star).winning)
        assert tp_sup_win(g) <= winners
