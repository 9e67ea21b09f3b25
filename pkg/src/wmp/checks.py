"""Named cross-check suites tying solvers to oracles and to each other,
plus the seeded corpora they run on.

Each suite returns a result with the first failing game serialized
inline; the harness is what both the acceptance tests and the ``wmp
check`` command replay.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from .model import (
    GameStructure,
    ObjectiveKind,
    ObjectiveSpec,
    P1,
    P2,
    serialize_game,
)
from . import arena, classical, window1d, windowkd
from .fixtures import fix3, fix4, fix5
from .strategy import (
    EmptyWinningSetError,
    min_memory_search,
    synth_bwmp,
    synth_fwmp_1d,
    synth_fwmp_k,
)
from .testkit import (
    GenSpec,
    gen_random_game,
    oracle_classical,
    oracle_window,
    tiny_game_family,
)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    witness: str | None = None
    detail: str = ""

    def line(self) -> str:
        out = f"SUITE {self.name} {'PASS' if self.passed else 'FAIL'}"
        if self.detail:
            out += f"  [{self.detail}]"
        if self.witness:
            inline = " | ".join(self.witness.strip().splitlines())
            out += f"  witness: {inline}"
        return out


@dataclass
class CrossCheckReport:
    results: list[SuiteResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        return [r.line() for r in self.results]


# --- corpora ---------------------------------------------------------------

def corpus_small(count: int = 300) -> list[GenSpec]:
    """|S| <= 6, W <= 3, one dimension."""
    return [
        GenSpec(
            states=2 + i % 5,
            dims=1,
            max_abs_weight=1 + i % 3,
            out_degree=(1, 3),
            p2_fraction=Fraction(1, 2),
            seed=1000 + i,
        )
        for i in range(count)
    ]


def corpus_medium(count: int = 500) -> list[GenSpec]:
    """|S| <= 8, W <= 4, one dimension."""
    return [
        GenSpec(
            states=2 + i % 7,
            dims=1,
            max_abs_weight=1 + i % 4,
            out_degree=(1, 3),
            p2_fraction=Fraction(1, 2),
            seed=2000 + i,
        )
        for i in range(count)
    ]


def corpus_shift(count: int = 200) -> list[GenSpec]:
    """|S| <= 6, W <= 3, used for the mean-payoff reduction run."""
    return [
        GenSpec(
            states=2 + i % 5,
            dims=1,
            max_abs_weight=1 + i % 3,
            out_degree=(1, 3),
            p2_fraction=Fraction(1, 2),
            seed=3000 + i,
        )
        for i in range(count)
    ]


def _games(corpus: list[GenSpec]) -> list[GameStructure]:
    return [gen_random_game(spec) for spec in corpus]


def _fail(name: str, g: GameStructure, detail: str) -> SuiteResult:
    return SuiteResult(name, False, witness=serialize_game(g), detail=detail)


# --- individual suites -------------------------------------------------------

def suite_paper_fixtures(_corpus) -> SuiteResult:
    """Acceptance line 1: the canonical fixture verdicts, including the
    strategy claims, all within ten seconds."""
    name = "paper-fixtures"
    t0 = time.time()
    g3, g4, g5 = fix3(), fix4(), fix5()
    if window1d.fwmp(g3, 3) != frozenset():
        return SuiteResult(name, False, detail="fwmp(FIX3,3) not empty")
    for keep in ({"c", "x"}, {"c", "y1", "y2"}):
        sub, _ = arena.subgame(g3, g3.id_set(keep))
        if window1d.fwmp(sub, 3) != frozenset(keep):
            return _fail(name, sub, "single-cycle restriction of FIX3 not winning")
    if window1d.fwmp(g4, 4) != frozenset(g4.names):
        return SuiteResult(name, False, detail="fwmp(FIX4,4) not everything")
    synth_fwmp_1d(g4, 4)  # verifies internally; raises on failure
    report = windowkd.fwmp_k(g5, 3)
    if frozenset(report.winning_p1) != frozenset(g5.names):
        return SuiteResult(
            name, False,
            detail="fwmp_k(FIX5,3) is empty: an adaptive opponent reopens a "
                   "dimension faster than any window can close, at every window size",
        )
    strat = synth_fwmp_k(g5, 3)
    if strat.size < 2:
        return SuiteResult(name, False, detail="FIX5 strategy suspiciously small")
    if min_memory_search(g5, ObjectiveSpec(ObjectiveKind.FIX, lmax=3), 1, 1) is not None:
        return SuiteResult(name, False, detail="memoryless machine wins FIX5")
    took = time.time() - t0
    if took > 10:
        return SuiteResult(name, False, detail=f"took {took:.1f}s > 10s")
    return SuiteResult(name, True, detail=f"{took:.1f}s")


def suite_corollary1(corpus) -> SuiteResult:
    name = "corollary1"
    for g in _games(corpus):
        star = window1d.sufficient_window(g)
        if window1d.fwmp(g, star) != frozenset(window1d.bounded_wmp(g).winning_p1):
            return _fail(name, g, f"fwmp at {star} differs from bounded winners")
    return SuiteResult(name, True, detail=f"{len(corpus)} games")


def suite_cross_algorithm(corpus) -> SuiteResult:
    name = "cross-algorithm"
    for g in _games(corpus):
        for lmax in range(1, 7):
            if window1d.fwmp(g, lmax) != frozenset(windowkd.fwmp_k(g, lmax).winning_p1):
                return _fail(name, g, f"fwmp != fwmp_k at lmax={lmax}")
            if window1d.direct_fwmp(g, lmax) != frozenset(
                windowkd.direct_fwmp_k(g, lmax).winning_p1
            ):
                return _fail(name, g, f"direct_fwmp != direct_fwmp_k at lmax={lmax}")
    return SuiteResult(name, True, detail=f"{len(corpus)} games x lmax 1..6")


def suite_oracle_sweep(_corpus, cross_every: int = 23) -> SuiteResult:
    """Acceptance line 4: exhaustive tiny family, solver equals oracle
    for the five window kinds and the two classical solvers."""
    name = "oracle-sweep"
    count = 0
    for g in tiny_game_family(3):
        count += 1
        budget = 5_000 if count % cross_every == 0 else None
        for lmax in (1, 2, 3):
            gw = frozenset(g.names[s] for s in window1d.good_win(g, lmax).winning)
            if gw != oracle_window(g, ObjectiveSpec(ObjectiveKind.GW, lmax=lmax), strategy_budget=budget):
                return _fail(name, g, f"gw mismatch at lmax={lmax}")
            if window1d.direct_fwmp(g, lmax) != oracle_window(
                g, ObjectiveSpec(ObjectiveKind.DIR_FIX, lmax=lmax), strategy_budget=budget
            ):
                return _fail(name, g, f"dfwmp mismatch at lmax={lmax}")
            if window1d.fwmp(g, lmax) != oracle_window(
                g, ObjectiveSpec(ObjectiveKind.FIX, lmax=lmax), strategy_budget=budget
            ):
                return _fail(name, g, f"fwmp mismatch at lmax={lmax}")
        if window1d.direct_bounded_wmp(g) != oracle_window(
            g, ObjectiveSpec(ObjectiveKind.DIR_BND), strategy_budget=budget
        ):
            return _fail(name, g, "dbwmp mismatch")
        if frozenset(window1d.bounded_wmp(g).winning_p1) != oracle_window(
            g, ObjectiveSpec(ObjectiveKind.BND), strategy_budget=budget
        ):
            return _fail(name, g, "bwmp mismatch")
        mp = classical.mp_threshold_win(g)
        if mp != oracle_classical(g, ObjectiveKind.MEAN_INF):
            return _fail(name, g, "mp vs meaninf oracle mismatch")
        if mp != oracle_classical(g, ObjectiveKind.MEAN_SUP):
            return _fail(name, g, "mp vs meansup oracle mismatch")
        if classical.tp_sup_win(g) != oracle_classical(g, ObjectiveKind.TOTAL_SUP):
            return _fail(name, g, "tpsup oracle mismatch")
    return SuiteResult(name, True, detail=f"{count} canonical games")


def suite_lemma2_inclusions(corpus) -> SuiteResult:
    name = "lemma2-inclusions"
    for g in _games(corpus):
        mp_win = classical.mp_threshold_win(g)
        values = classical.mp_value(g)
        strictly_pos = frozenset(s for s, v in values.items() if v > 0)
        bounded = frozenset(window1d.bounded_wmp(g).winning_p1)
        if not bounded <= mp_win:
            return _fail(name, g, "bounded winners not below mean-payoff winners")
        if not strictly_pos <= bounded:
            return _fail(name, g, "positive mean-payoff value not bounded-winning")
        if not window1d.direct_bounded_wmp(g) <= classical.tp_sup_win(g):
            return _fail(name, g, "direct bounded not below total-payoff winners")
    return SuiteResult(name, True, detail=f"{len(corpus)} games")


def suite_strictness_witness(corpus) -> SuiteResult:
    """A game whose mean-payoff winners are everything while the
    bounded window winners are empty must exist in the corpus."""
    name = "strictness-witness"
    for g in _games(corpus) + [fix3()]:
        if classical.mp_threshold_win(g) == frozenset(g.names) and not window1d.bounded_wmp(g).winning_p1:
            return SuiteResult(
                name, True, witness=serialize_game(g),
                detail="mean-payoff wins everywhere, bounded window nowhere",
            )
    return SuiteResult(name, False, detail="no strictness witness found")


def suite_lemma14(corpus) -> SuiteResult:
    name = "lemma14-reduction"
    for g in _games(corpus):
        shifted = window1d.shift_for_mp_reduction(g)
        if classical.mp_threshold_win(g) != frozenset(window1d.bounded_wmp(shifted).winning_p1):
            return _fail(name, g, "mean-payoff winners differ from shifted bounded winners")
    return SuiteResult(name, True, detail=f"{len(corpus)} games")


def suite_lemma8(corpus) -> SuiteResult:
    name = "lemma8-inclusion"
    for g in _games(corpus):
        star = window1d.sufficient_window(g)
        gw = frozenset(g.names[s] for s in window1d.good_win(g, star).winning)
        if not classical.tp_sup_win(g) <= gw:
            return _fail(name, g, f"total-payoff winner outside good_win at {star}")
    return SuiteResult(name, True, detail=f"{len(corpus)} games")


def suite_memory_bounds(corpus) -> SuiteResult:
    name = "memory-bounds"
    games = _games(corpus[:40]) + [fix4()]
    for g in games:
        for lmax in (1, 2, 3, 4):
            try:
                strat = synth_fwmp_1d(g, lmax)
            except EmptyWinningSetError:
                continue
            if strat.size > g.n * lmax + g.n:
                return _fail(name, g, f"fixed-window machine too big at lmax={lmax}")
        try:
            strat = synth_bwmp(g)
        except EmptyWinningSetError:
            continue
        if strat.size != 1:
            return _fail(name, g, "bounded-window machine not memoryless")
    g3 = fix3()
    spec = ObjectiveSpec(ObjectiveKind.FIX, lmax=3)
    if min_memory_search(g3, spec, P2, 1) is not None:
        return SuiteResult(name, False, detail="memoryless FIX3 spoiler exists")
    if min_memory_search(g3, spec, P2, 2) is None:
        return SuiteResult(name, False, detail="no two-memory FIX3 spoiler found")
    return SuiteResult(name, True, detail=f"{len(games)} games")


def suite_monotonicity(corpus) -> SuiteResult:
    name = "monotonicity-containments"
    for g in _games(corpus):
        bounded = frozenset(window1d.bounded_wmp(g).winning_p1)
        direct_bounded = window1d.direct_bounded_wmp(g)
        prev_f: frozenset[str] = frozenset()
        prev_d: frozenset[str] = frozenset()
        for lmax in range(1, 7):
            fw = window1d.fwmp(g, lmax)
            dw = window1d.direct_fwmp(g, lmax)
            if not (prev_f <= fw and prev_d <= dw):
                return _fail(name, g, f"winning sets shrank at lmax={lmax}")
            if not dw <= fw:
                return _fail(name, g, f"direct not below prefix-independent at lmax={lmax}")
            if not fw <= bounded:
                return _fail(name, g, f"fixed not below bounded at lmax={lmax}")
            if not dw <= direct_bounded:
                return _fail(name, g, f"direct fixed not below direct bounded at lmax={lmax}")
            prev_f, prev_d = fw, dw
        if not direct_bounded <= bounded:
            return _fail(name, g, "direct bounded not below bounded")
    return SuiteResult(name, True, detail=f"{len(corpus)} games x lmax 1..6")


def _ring_game(n: int) -> GameStructure:
    states = [(f"s{i}", P2 if i % 2 else P1) for i in range(n)]
    edges = []
    for i in range(n):
        edges.append((f"s{i}", f"s{(i + 1) % n}", (1 if i % 2 else -1,)))
        edges.append((f"s{i}", f"s{(i + 2) % n}", (0,)))
    return GameStructure.build(states, edges, 1, "s0")


def suite_complexity_smoke(_corpus) -> SuiteResult:
    """Recurrence-update counts of good_win stay within a factor two of
    a linear fit in |E| * lmax over a doubling series."""
    name = "complexity-smoke"
    points = []
    for n, lmax in ((8, 8), (16, 16), (32, 32), (64, 32)):
        g = _ring_game(n)
        table = window1d.good_win(g, lmax)
        points.append((len(g.edges) * lmax, table.update_count))
    base = points[0][1] / points[0][0]
    for size, count in points[1:]:
        ratio = count / size
        if not (base / 2 <= ratio <= base * 2):
            return SuiteResult(
                name, False, detail=f"update count {count} vs size {size} breaks linear fit"
            )
    return SuiteResult(name, True, detail=f"{len(points)} sizes")


SUITES: dict[str, tuple] = {
    # name -> (function, default corpus builder or None)
    "paper-fixtures": (suite_paper_fixtures, None),
    "corollary1": (suite_corollary1, corpus_small),
    "cross-algorithm": (suite_cross_algorithm, corpus_medium),
    "oracle-sweep": (suite_oracle_sweep, None),
    "lemma2-inclusions": (suite_lemma2_inclusions, corpus_small),
    "strictness-witness": (suite_strictness_witness, corpus_small),
    "lemma14-reduction": (suite_lemma14, corpus_shift),
    "lemma8-inclusion": (suite_lemma8, corpus_small),
    "memory-bounds": (suite_memory_bounds, corpus_small),
    "monotonicity-containments": (suite_monotonicity, corpus_small),
    "complexity-smoke": (suite_complexity_smoke, None),
}


def cross_check(corpus: list[GenSpec] | None, checks: list[str] | None = None) -> CrossCheckReport:
    """Run named suites (default: all) over the given corpus (default:
    each suite's own documented corpus)."""
    names = checks if checks else list(SUITES)
    report = CrossCheckReport()
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
        fn, default_corpus = SUITES[name]
        chosen = corpus if corpus is not None else (default_corpus() if default_corpus else None)
        report.results.append(fn(chosen))
    return report
