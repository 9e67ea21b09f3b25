"""One-dimension window mean-payoff solvers.

good_win computes the step-indexed table of best guaranteed running
peaks; direct_fwmp shrinks its winning set to a greatest fixpoint;
fwmp peels attractors of direct regions off the arena; the bounded
variants run the total-payoff oracle inside a least/greatest fixpoint
pair.  All solvers work at threshold zero; rational thresholds are
normalized away up front.

Restriction convention: when a live set is imposed, edges leaving it
are dropped for the owner's max, while a P2 state that can leave the
live set at all is immediately dead (value minus infinity, any step
count).  A candidate set only certifies the direct objective if no P2
choice can exit it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import GameStructure, P1, P2, SolveReport
from . import arena
from .classical import DEFAULT_ORACLE_BUDGET, neg_sup_tp

NEG = float("-inf")


@dataclass(frozen=True)
class GoodWinTable:
    """Best guaranteed window sums per (step, state) plus the winners.

    ``rows[i][s]`` is the best running-peak sum P1 forces from state
    index ``s`` within ``i`` steps while staying in ``live``: the value
    of ``max over prefixes up to length i`` of the prefix sum, under
    optimal play of both sides.  A window closes exactly when that peak
    reaches zero, so state ``s`` wins the good window objective iff
    ``rows[lmax][s] >= 0`` (the peak is monotone in the step count).
    Excluded and dead states carry minus infinity; finite values
    saturate at +/-(lmax*W+1), where only the sign can still matter.
    """

    lmax: int
    live: frozenset[int]
    rows: tuple[tuple[float, ...], ...]
    winning: frozenset[int]
    update_count: int

    def value(self, step: int, state: int) -> float:
        return self.rows[step][state]


def good_win(
    g: GameStructure, lmax: int, live: frozenset[int] | None = None
) -> GoodWinTable:
    """Winning table for the good window objective at threshold zero."""
    if g.dims != 1:
        raise ValueError(f"good_win needs k=1, got k={g.dims}")
    if lmax < 1:
        raise ValueError("lmax must be >= 1")
    if live is None:
        live = g.all_indices
    cap = lmax * g.max_abs_weight + 1
    retained: dict[int, list[tuple[int, int]]] = {}
    dead: set[int] = set()
    for s in live:
        edges = g.succ[s]
        kept = [(t, w[0]) for t, w in edges if t in live]
        if (g.owner[s] == P2 and len(kept) != len(edges)) or not kept:
            dead.add(s)
            retained[s] = []
        else:
            retained[s] = kept
    order = sorted(live)
    prev: dict[int, float] = {s: 0 for s in order}
    rows = [tuple(prev.get(s, NEG) for s in range(g.n))]
    winning: set[int] = set()
    updates = 0
    for _ in range(lmax):
        cur: dict[int, float] = {}
        for s in order:
            kept = retained[s]
            if not kept:
                cur[s] = NEG
                continue
            # per edge: the window closes on the edge itself (value w)
            # or the play goes on and the best peak is w plus the
            # continuation's peak, whichever is higher
            if g.owner[s] == P1:
                best = NEG
                for t, w in kept:
                    v = prev[t]
                    cand = w if v == NEG else (w if w > w + v else w + v)
                    if cand > best:
                        best = cand
            else:
                best = cap + 1
                for t, w in kept:
                    v = prev[t]
                    cand = w if v == NEG else (w if w > w + v else w + v)
                    if cand < best:
                        best = cand
            updates += len(kept)
            if best != NEG:
                best = cap if best > cap else (-cap if best < -cap else best)
                if best >= 0:
                    winning.add(s)
            cur[s] = best
        prev = cur
        rows.append(tuple(prev.get(s, NEG) for s in range(g.n)))
    return GoodWinTable(lmax, frozenset(live), tuple(rows), frozenset(winning), updates)


def _direct_fwmp_table(g: GameStructure, lmax: int) -> tuple[frozenset[int], GoodWinTable | None]:
    """Greatest fixpoint of the good-window winning set, with the table
    of the final round (None when the fixpoint is empty)."""
    live = g.all_indices
    while live:
        table = good_win(g, lmax, live)
        if table.winning == live:
            return live, table
        live = table.winning
    return frozenset(), None


def direct_fwmp(g: GameStructure, lmax: int) -> frozenset[str]:
    """Winning states for the direct fixed window objective: the largest
    set whose members win the good window objective using that set only."""
    fix, _ = _direct_fwmp_table(g, lmax)
    return frozenset(g.names[s] for s in fix)


@dataclass(frozen=True)
class FwmpLayer:
    """One peeling round of the fixed-window solver: the subgame it ran
    in, the direct region with its table, and the attracted states."""

    sub: GameStructure
    direct_ids: frozenset[str]
    table: GoodWinTable | None
    attracted_ids: frozenset[str]
    attr_moves: dict[str, str]


def _fwmp_layers(g: GameStructure, lmax: int) -> list[FwmpLayer]:
    layers: list[FwmpLayer] = []
    live_ids = set(g.names)
    while live_ids:
        sub, _ = arena.subgame(g, g.id_set(live_ids))
        fix_idx, table = _direct_fwmp_table(sub, lmax)
        if not fix_idx:
            break
        attr, moves = arena.attractor_with_moves(sub, P1, fix_idx)
        layers.append(
            FwmpLayer(
                sub=sub,
                direct_ids=frozenset(sub.names[s] for s in fix_idx),
                table=table,
                attracted_ids=frozenset(sub.names[s] for s in attr),
                attr_moves={sub.names[s]: sub.names[t] for s, t in moves.items()},
            )
        )
        live_ids -= set(sub.names[s] for s in attr)
    return layers


def fwmp(g: GameStructure, lmax: int) -> frozenset[str]:
    """Winning states for the prefix-independent fixed window objective:
    accumulate P1 attractors of direct regions until none is left."""
    if g.dims != 1:
        raise ValueError(f"fwmp needs k=1, got k={g.dims}")
    out: set[str] = set()
    for layer in _fwmp_layers(g, lmax):
        out |= layer.attracted_ids
    return frozenset(out)


def unb_open_window(
    g: GameStructure, budget: int = DEFAULT_ORACLE_BUDGET
) -> frozenset[str]:
    """States from which P2 can force some position whose window never
    closes: least fixpoint of P2 attractors of negative-total-payoff
    regions in shrinking subgames."""
    if g.dims != 1:
        raise ValueError(f"unb_open_window needs k=1, got k={g.dims}")
    all_ids = frozenset(g.names)
    trapped: frozenset[str] = frozenset()
    while trapped != all_ids:
        sub, _ = arena.subgame(g, g.id_set(all_ids - trapped))
        bad = neg_sup_tp(sub, budget)
        if not bad:
            return trapped
        attr, _ = arena.attractor_with_moves(sub, P2, sub.id_set(bad))
        grown = trapped | frozenset(sub.names[s] for s in attr)
        if grown == trapped:
            return trapped
        trapped = grown
    return trapped


@dataclass(frozen=True)
class BoundedLayer:
    """One round of the bounded-window solver: the subgame ids where the
    total-payoff region lives and the attractor moves reaching it."""

    region_ids: frozenset[str]
    tp_moves: dict[str, str]
    attr_moves: dict[str, str]
    attracted_ids: frozenset[str]


def _bounded_layers(
    g: GameStructure, budget: int
) -> tuple[frozenset[str], list[BoundedLayer]]:
    all_ids = frozenset(g.names)
    won: frozenset[str] = frozenset()
    layers: list[BoundedLayer] = []
    trapped = unb_open_window(g, budget)
    for _ in range(g.n + 1):
        if trapped == all_ids - won:
            return won, layers
        region = (all_ids - won) - trapped
        sub, _ = arena.subgame(g, g.id_set(region))
        tp_moves = _tp_region_moves(sub, budget)
        attr, moves = arena.attractor_with_moves(g, P1, g.id_set(all_ids - trapped))
        attracted = frozenset(g.names[s] for s in attr)
        layers.append(
            BoundedLayer(
                region_ids=region,
                tp_moves=tp_moves,
                attr_moves={g.names[s]: g.names[t] for s, t in moves.items()},
                attracted_ids=attracted,
            )
        )
        won = attracted
        if won == all_ids:
            return won, layers
        subrest, _ = arena.subgame(g, g.id_set(all_ids - won))
        trapped = unb_open_window(subrest, budget)
    raise AssertionError("bounded-window fixpoint failed to stabilize in |S|+1 rounds")


def _tp_region_moves(sub: GameStructure, budget: int) -> dict[str, str]:
    from .classical import uniform_tp_strategy

    return uniform_tp_strategy(sub, budget)


def bounded_wmp(
    g: GameStructure, budget: int = DEFAULT_ORACLE_BUDGET
) -> SolveReport:
    """Bounded window mean-payoff winners, with the sufficient window
    size as a witness when the winning set is nonempty."""
    if g.dims != 1:
        raise ValueError(f"bounded_wmp needs k=1, got k={g.dims}")
    won, _ = _bounded_layers(g, budget)
    return SolveReport.from_sets(
        g, won, witness_lmax=sufficient_window(g) if won else None
    )


def direct_bounded_wmp(
    g: GameStructure, budget: int = DEFAULT_ORACLE_BUDGET
) -> frozenset[str]:
    """Direct bounded window winners: the prefix-independence peeling
    collapses, leaving the complement of the never-closing region."""
    return frozenset(g.names) - unb_open_window(g, budget)


def sufficient_window(g: GameStructure) -> int:
    """Window size that already captures the bounded objective:
    (|S|-1)*(|S|*W+1), floored at 1."""
    if g.dims != 1:
        raise ValueError(f"sufficient_window needs k=1, got k={g.dims}")
    return max(1, (g.n - 1) * (g.n * g.max_abs_weight + 1))


def shift_for_mp_reduction(g: GameStructure) -> GameStructure:
    """Integerized positive shift by 1/(|S|+1): every weight w becomes
    (|S|+1)*w + 1.  Mean-payoff threshold winners of the original game
    equal bounded-window winners of the shifted game."""
    if g.dims != 1:
        raise ValueError(f"shift_for_mp_reduction needs k=1, got k={g.dims}")
    scale = g.n + 1
    edges = tuple((a, b, (scale * w[0] + 1,)) for a, b, w in g.edges)
    return GameStructure(g.states, edges, g.dims, g.init)
