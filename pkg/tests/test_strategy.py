import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wmp.model import (
    GameStructure,
    InvalidStrategyError,
    ObjectiveKind as K,
    ObjectiveSpec as S,
    P1,
    P2,
    eval_lasso,
)
from wmp.strategy import (
    EmptyWinningSetError,
    MooreStrategy,
    check_strategy,
    min_memory_search,
    parse_strategy,
    serialize_strategy,
    synth_bwmp,
    synth_fwmp_1d,
    synth_fwmp_k,
    verify_strategy,
)
from wmp.testkit import oracle_window
from wmp.window1d import bounded_wmp, fwmp, sufficient_window
from wmp.windowkd import build_window_product, fwmp_k

from conftest import small_games


def constant_machine(g, player, choices=None):
    memory = ("m0",)
    update = {("m0", s): "m0" for s, _ in g.states}
    action = {}
    for s, owner in g.states:
        if owner == player:
            target = (choices or {}).get(s, g.names[g.succ[g.index[s]][0][0]])
            action[("m0", s)] = target
    return MooreStrategy(player, memory, "m0", update, action)


def opposite_choice_machine(g5):
    memory = ("mL", "mR")
    update = {
        (m, s): ("mL" if s == "s1L" else "mR" if s == "s1R" else m)
        for m in memory
        for s in g5.names
    }
    action = {}
    for m in memory:
        action[(m, "t1")] = "t1R" if m == "mL" else "t1L"
        action[(m, "t1L")] = "s1"
        action[(m, "t1R")] = "s1"
    return MooreStrategy(P1, memory, "mL", update, action)


class TestWellFormedness:
    def test_partial_update_rejected(self, g6):
        broken = constant_machine(g6, P1)
        del broken.update[("m0", "a")]
        with pytest.raises(InvalidStrategyError, match="update"):
            check_strategy(g6, broken)

    def test_non_edge_action_rejected(self, g6):
        broken = constant_machine(g6, P1, {"a": "a"})
        with pytest.raises(InvalidStrategyError, match="not an edge"):
            check_strategy(g6, broken)

    def test_verify_raises_on_malformed(self, g6):
        broken = constant_machine(g6, P1, {"a": "a"})
        with pytest.raises(InvalidStrategyError):
            verify_strategy(g6, broken, S(K.FIX, lmax=1))


class TestWstratFormat:
    def test_round_trip(self, g4):
        strat = synth_fwmp_1d(g4, 4)
        text = serialize_strategy(strat)
        again = parse_strategy(text)
        assert again.player == strat.player
        assert again.memory == strat.memory
        assert again.initial == strat.initial
        assert again.update == strat.update
        assert again.next_action == strat.next_action

    def test_parse_rejects_junk(self):
        from wmp.model import ParseError

        with pytest.raises(ParseError):
            parse_strategy("wstrat 1\nplayer 3\n")


class TestVerify:
    def test_fix1_self_loop_direct(self, g1):
        machine = constant_machine(g1, P1)
        assert verify_strategy(g1, machine, S(K.DIR_FIX, lmax=1)).passed

    def test_fix5_opposite_choice_wins_good_window(self, g5):
        starts = sorted(oracle_window(g5, S(K.GW, lmax=3)))
        assert starts == ["s1", "s1L", "s1R", "t1L", "t1R"]
        verdict = verify_strategy(g5, opposite_choice_machine(g5), S(K.GW, lmax=3), starts=starts)
        assert verdict.passed

    def test_fix5_memoryless_fails_good_window(self, g5):
        machine = constant_machine(g5, P1, {"t1": "t1L"})
        verdict = verify_strategy(g5, machine, S(K.GW, lmax=3), starts=["s1"])
        assert not verdict.passed
        cex = verdict.counterexample
        assert cex is not None
        assert eval_lasso(g5, cex, S(K.GW, lmax=3)) is False
        assert cex.stem[0] == "s1"

    def test_fix5_no_machine_wins_fixed_window(self, g5):
        # the mirrored gadgets spoil the prefix-independent objective at
        # every window size: even the opposite-choice machine fails
        verdict = verify_strategy(
            g5, opposite_choice_machine(g5), S(K.FIX, lmax=3), starts=["s1"]
        )
        assert not verdict.passed
        assert eval_lasso(g5, verdict.counterexample, S(K.FIX, lmax=3)) is False

    def test_default_start_is_init(self, g6):
        machine = constant_machine(g6, P1)
        assert verify_strategy(g6, machine, S(K.FIX, lmax=1)).passed
        assert not verify_strategy(g6, machine, S(K.DIR_FIX, lmax=1)).passed

    def test_p2_machine_verdicts(self, g3):
        # alternating between both cycles spoils window size three
        alternator = MooreStrategy(
            P2,
            ("mA", "mB"),
            "mA",
            update={
                (m, s): (("mB" if m == "mA" else "mA") if s == "c" else m)
                for m in ("mA", "mB")
                for s in g3.names
            },
            next_action={
                (m, s): {"c": ("x" if m == "mA" else "y1"), "x": "c", "y1": "y2", "y2": "c"}[s]
                for m in ("mA", "mB")
                for s in g3.names
            },
        )
        verdict = verify_strategy(g3, alternator, S(K.FIX, lmax=3), starts=g3.names)
        assert verdict.passed
        # at window size five the alternation no longer spoils anything
        verdict5 = verify_strategy(g3, alternator, S(K.FIX, lmax=5), starts=g3.names)
        assert not verdict5.passed
        assert eval_lasso(g3, verdict5.counterexample, S(K.FIX, lmax=5)) is True


class TestSynthFixed1d:
    def test_fix6_memoryless(self, g6):
        strat = synth_fwmp_1d(g6, 1)
        assert strat.size == 1
        assert strat.next_action[("r0", "a")] == "b"

    def test_fix4_alternates_cycles(self, g4):
        strat = synth_fwmp_1d(g4, 4)
        assert strat.size <= g4.n * 4 + g4.n
        verdict = verify_strategy(g4, strat, S(K.FIX, lmax=4), starts=g4.names)
        assert verdict.passed

    def test_fix3_empty_raises(self, g3):
        with pytest.raises(EmptyWinningSetError):
            synth_fwmp_1d(g3, 3)

    @settings(max_examples=25, deadline=None)
    @given(small_games(max_states=5, max_weight=2), st.integers(1, 4))
    def test_synthesis_wins_from_every_winner(self, g, lmax):
        winning = fwmp(g, lmax)
        if not winning:
            return
        strat = synth_fwmp_1d(g, lmax)
        assert strat.size <= g.n * lmax + g.n
        verdict = verify_strategy(g, strat, S(K.FIX, lmax=lmax), starts=sorted(winning))
        assert verdict.passed


class TestSynthBounded:
    def test_fix1(self, g1):
        strat = synth_bwmp(g1)
        assert strat.size == 1
        assert strat.next_action[("m0", "a")] == "a"

    def test_fix4_picks_positive_cycle(self, g4):
        strat = synth_bwmp(g4)
        assert strat.size == 1
        assert strat.next_action[("m0", "s")] == "a1"
        verdict = verify_strategy(
            g4, strat, S(K.FIX, lmax=sufficient_window(g4)), starts=g4.names
        )
        assert verdict.passed

    def test_fix3_empty_raises(self, g3):
        with pytest.raises(EmptyWinningSetError):
            synth_bwmp(g3)

    @settings(max_examples=15, deadline=None)
    @given(small_games(max_states=4, max_weight=2))
    def test_memoryless_and_winning(self, g):
        winning = frozenset(bounded_wmp(g).winning_p1)
        if not winning:
            return
        strat = synth_bwmp(g)
        assert strat.size == 1
        verdict = verify_strategy(
            g, strat, S(K.FIX, lmax=sufficient_window(g)), starts=sorted(winning)
        )
        assert verdict.passed


class TestSynthProduct:
    def test_fix6_collapses(self, g6):
        strat = synth_fwmp_k(g6, 1)
        verdict = verify_strategy(g6, strat, S(K.FIX, lmax=1), starts=["a", "b"])
        assert verdict.passed

    def test_two_dim_game(self):
        g = GameStructure.build(
            [("a", P1), ("b", P2)],
            [("a", "b", (1, -1)), ("b", "a", (-1, 1)), ("b", "b", (0, 0))],
            2,
            "a",
        )
        winning = frozenset(fwmp_k(g, 2).winning_p1)
        if winning:
            strat = synth_fwmp_k(g, 2)
            product = build_window_product(g, 2, None)
            assert strat.size <= product.game.n + 1
            assert verify_strategy(g, strat, S(K.FIX, lmax=2), starts=sorted(winning)).passed

    def test_fix5_raises_empty(self, g5):
        with pytest.raises(EmptyWinningSetError):
            synth_fwmp_k(g5, 3)
        with pytest.raises(EmptyWinningSetError):
            synth_fwmp_k(g5, 3, direct=True)

    @settings(max_examples=10, deadline=None)
    @given(small_games(max_states=3, max_weight=1, dims=2), st.integers(1, 2))
    def test_random_two_dim_synthesis(self, g, lmax):
        winning = frozenset(fwmp_k(g, lmax).winning_p1)
        if not winning:
            return
        strat = synth_fwmp_k(g, lmax)
        kind = S(K.FIX, lmax=lmax)
        assert verify_strategy(g, strat, kind, starts=sorted(winning)).passed

    @settings(max_examples=15, deadline=None)
    @given(small_games(max_states=4, max_weight=1), st.integers(1, 3))
    def test_losing_states_get_falsifying_lassos(self, g, lmax):
        # outside the winning set the opponent defeats even the
        # synthesized machine, and the verifier exhibits the lasso
        winning = frozenset(fwmp_k(g, lmax).winning_p1)
        losing = sorted(frozenset(g.names) - winning)
        if not winning or not losing:
            return
        strat = synth_fwmp_k(g, lmax)
        spec = S(K.FIX, lmax=lmax)
        for s in losing:
            verdict = verify_strategy(g, strat, spec, starts=[s])
            assert not verdict.passed
            assert eval_lasso(g, verdict.counterexample, spec) is False


class TestMinMemory:
    def test_fix3_spoiler_needs_two_memory(self, g3):
        spec = S(K.FIX, lmax=3)
        assert min_memory_search(g3, spec, P2, 1) is None
        found = min_memory_search(g3, spec, P2, 2)
        assert found is not None and found.size == 2
        assert verify_strategy(g3, found, spec, starts=g3.names).passed

    def test_fix5_good_window_needs_two_memory(self, g5):
        starts = sorted(oracle_window(g5, S(K.GW, lmax=3)))
        spec = S(K.GW, lmax=3)
        assert min_memory_search(g5, spec, P1, 1, starts=starts) is None
        found = min_memory_search(g5, spec, P1, 2, starts=starts)
        assert found is not None and found.size == 2

    def test_budget_guard(self, g5):
        from wmp.model import ResourceLimitError

        with pytest.raises(ResourceLimitError):
            min_memory_search(g5, S(K.GW, lmax=3), P1, 2, enum_budget=10)

    def test_every_finite_p2_machine_on_fix3_loses_at_some_window(self, g3):
        # the bounded objective needs unbounded spoiling rounds: each
        # finite machine only delays windows by a bounded amount
        import itertools

        spec_bound = 3 * 2 * g3.n + 2
        for size in (1, 2):
            memory = tuple(f"m{i}" for i in range(size))
            hub_choices = itertools.product(["x", "y1"], repeat=size)
            update_opts = itertools.product(memory, repeat=size * g3.n)
            update_slots = [(m, s) for m in memory for s in g3.names]
            for acts in hub_choices:
                for upd in update_opts:
                    machine = MooreStrategy(
                        P2,
                        memory,
                        memory[0],
                        dict(zip(update_slots, upd)),
                        {
                            (m, s): (acts[i] if s == "c" else {"x": "c", "y1": "y2", "y2": "c"}[s])
                            for i, m in enumerate(memory)
                            for s in ("c", "x", "y1", "y2")
                        },
                    )
                    beaten = any(
                        not verify_strategy(
                            g3, machine, S(K.FIX, lmax=lmax), starts=["c"]
                        ).passed
                        for lmax in range(1, spec_bound)
                    )
                    assert beaten
