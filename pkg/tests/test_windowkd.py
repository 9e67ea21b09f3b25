import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wmp.model import GameStructure, P1, P2, ResourceLimitError, parse_game
from wmp.testkit import GenSpec, gen_random_game
from wmp.window1d import direct_fwmp, fwmp
from wmp.windowkd import (
    build_window_product,
    direct_fwmp_k,
    fresh_window,
    fwmp_k,
    serialize_product,
    step_window,
)

from conftest import small_games


class TestStepRule:
    def test_reset_on_nonnegative(self):
        ws = fresh_window(2, 3)
        assert step_window(ws, (0, 1), 3) == ((0, 3), (0, 3))

    def test_decrement_on_deficit(self):
        ws = fresh_window(1, 3)
        assert step_window(ws, (-2,), 3) == ((-2, 2),)

    def test_overflow_at_deadline(self):
        assert step_window(((-1, 1),), (-1,), 3) is None
        assert step_window(((-1, 1),), (1,), 3) == ((0, 3),)


class TestProduct:
    def test_fix6_exact_shape(self, g6):
        p = build_window_product(g6, 1, ["a", "b"])
        assert p.game.n == 3
        assert len(p.bad) == 1
        (zeta,) = p.bad
        assert p.base_of[zeta] == "b"
        # a's only move overflows immediately; b loops on fresh counters
        a_entry, b_entry = p.entry["a"], p.entry["b"]
        assert [t for t, _ in p.game.succ[a_entry]] == [zeta]
        assert [t for t, _ in p.game.succ[zeta]] == [b_entry]
        assert [t for t, _ in p.game.succ[b_entry]] == [b_entry]

    def test_nonnegative_weights_reach_no_bad_state(self):
        g = parse_game(
            "wgame 1\ndims 1\nstate a P1\nstate b P2\n"
            "edge a b 1\nedge b a 0\ninit a\n"
        )
        for lmax in (1, 2, 4):
            assert build_window_product(g, lmax, None).bad == frozenset()

    def test_fix5_sum_range_and_size(self, g5):
        p = build_window_product(g5, 3, None)
        for ws in p.window_of:
            if ws is None:
                continue
            for sig, tau in ws:
                assert sig in (-1, 0)
                assert 1 <= tau <= 3
        # regression pin for the reachable size
        assert p.game.n == 18

    @settings(max_examples=40, deadline=None)
    @given(small_games(max_states=4, max_weight=2), st.integers(1, 4))
    def test_counter_bounds_and_size_cap(self, g, lmax):
        p = build_window_product(g, lmax, None)
        w = g.max_abs_weight
        for ws in p.window_of:
            if ws is None:
                continue
            for sig, tau in ws:
                assert -lmax * w <= sig <= 0
                assert 1 <= tau <= lmax
                assert (sig == 0) == (tau == lmax)
        bound = g.n * (lmax * (lmax * w + 1)) ** g.dims + g.n
        assert p.game.n <= bound

    def test_cap_is_enforced(self, g5):
        with pytest.raises(ResourceLimitError):
            build_window_product(g5, 3, None, product_cap=10)

    def test_product_game_is_total(self, g5):
        p = build_window_product(g5, 3, None)
        from wmp.model import validate

        assert validate(p.game) == []

    def test_serialize_product_sidecar(self, g6):
        p = build_window_product(g6, 1, None)
        text, sidecar = serialize_product(p)
        reparsed = parse_game(text)
        assert reparsed.n == p.game.n
        assert sidecar.splitlines() == [f"bad {p.game.names[i]}" for i in sorted(p.bad)]


class TestSolvers:
    def test_fix5_loses_at_every_window_size(self, g5):
        # an adaptive opponent mirrors the last closing choice, reopening
        # one dimension per round faster than its window can close; this
        # defeats every finite window size, not just lmax = 3
        for lmax in (3, 4, 7):
            assert fwmp_k(g5, lmax).winning_p1 == ()
            assert direct_fwmp_k(g5, lmax).winning_p1 == ()

    def test_fix6_collapses_to_one_dim(self, g6):
        assert frozenset(fwmp_k(g6, 1).winning_p1) == fwmp(g6, 1) == {"a", "b"}
        assert frozenset(direct_fwmp_k(g6, 1).winning_p1) == {"b"}

    def test_fix3_matches_one_dim_path(self, g3):
        assert fwmp_k(g3, 3).winning_p1 == ()

    def test_fix4_direct_matches_one_dim_path(self, g4):
        assert frozenset(direct_fwmp_k(g4, 4).winning_p1) == direct_fwmp(g4, 4)
        assert direct_fwmp(g4, 4) == frozenset(g4.names)

    def test_two_dim_win(self):
        g = GameStructure.build(
            [("a", P1), ("b", P1)],
            [("a", "b", (1, -1)), ("b", "a", (-1, 1))],
            2,
            "a",
        )
        assert frozenset(fwmp_k(g, 2).winning_p1) == {"a", "b"}
        assert direct_fwmp_k(g, 2).winning_p1 == ("a", "b")
        assert fwmp_k(g, 1).winning_p1 == ()

    def test_direct_below_prefix_independent(self, g5):
        g = gen_random_game(GenSpec(states=4, dims=2, max_abs_weight=1, seed=5))
        for lmax in (1, 2, 3):
            direct = frozenset(direct_fwmp_k(g, lmax).winning_p1)
            assert direct <= frozenset(fwmp_k(g, lmax).winning_p1)

    @settings(max_examples=40, deadline=None)
    @given(small_games(max_states=5, max_weight=2), st.integers(1, 5))
    def test_one_dim_agreement(self, g, lmax):
        assert frozenset(fwmp_k(g, lmax).winning_p1) == fwmp(g, lmax)
        assert frozenset(direct_fwmp_k(g, lmax).winning_p1) == direct_fwmp(g, lmax)

    @settings(max_examples=20, deadline=None)
    @given(small_games(max_states=3, max_weight=1, dims=2), st.integers(1, 3))
    def test_monotone_in_lmax_two_dims(self, g, lmax):
        assert frozenset(fwmp_k(g, lmax).winning_p1) <= frozenset(
            fwmp_k(g, lmax + 1).winning_p1
        )
        assert frozenset(direct_fwmp_k(g, lmax).winning_p1) <= frozenset(
            direct_fwmp_k(g, lmax + 1).winning_p1
        )
