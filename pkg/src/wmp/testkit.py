"""Seeded game generation, independent brute-force oracles, and the
cross-check harness tying every solver to an oracle or a second
algorithmic path.

The oracles deliberately re-implement the window bookkeeping on their
own: they share no winner computation with the solver modules.  Window
winners are decided by enumerating memoryless strategies over a
window-counter product (where positional strategies suffice for both
players) and checking all responses of the other side by cycle
analysis, interleaving both directions until one produces a
certificate.

Generation is pinned to the xoshiro256** generator (Blackman/Vigna
constants) seeded through splitmix64, so identical generation specs
produce identical games on any platform or implementation language.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .model import (
    GameStructure,
    Lasso,
    ObjectiveKind,
    ObjectiveSpec,
    P1,
    P2,
    ResourceLimitError,
    satisfies,
    serialize_game,
)

DEFAULT_ORACLE_PRODUCT_CAP = 20_000
DEFAULT_STRATEGY_BUDGET = 1_000_000

MASK64 = (1 << 64) - 1


class Xoshiro256StarStar:
    """xoshiro256** 1.0; state seeded with splitmix64.  Pinned so that
    corpora are reproducible across machines and languages."""

    def __init__(self, seed: int):
        s = seed & MASK64
        state = []
        for _ in range(4):
            s = (s + 0x9E3779B97F4A7C15) & MASK64
            z = s
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
            state.append(z ^ (z >> 31))
        self._s = state

    @staticmethod
    def _rotl(x: int, k: int) -> int:
        return ((x << k) | (x >> (64 - k))) & MASK64

    def next_u64(self) -> int:
        s = self._s
        result = (self._rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = self._rotl(s[3], 45)
        return result

    def below(self, n: int) -> int:
        # plain modulo draw; bias is irrelevant here, determinism is not
        return self.next_u64() % n


GENERATOR_VERSION = "xoshiro256** v1 / splitmix64 seeding / modulo draws"


@dataclass(frozen=True)
class GenSpec:
    """Deterministic random-game recipe; equal specs give equal games."""

    states: int
    dims: int = 1
    max_abs_weight: int = 1
    out_degree: tuple[int, int] = (1, 2)
    p2_fraction: Fraction = Fraction(1, 2)
    seed: int = 0

    def __post_init__(self):
        if self.states < 1 or self.dims < 1:
            raise ValueError("states and dims must be >= 1")
        lo, hi = self.out_degree
        if lo < 1 or hi < lo:
            raise ValueError("out_degree range must satisfy 1 <= lo <= hi")
        object.__setattr__(self, "p2_fraction", Fraction(self.p2_fraction))


def gen_random_game(spec: GenSpec) -> GameStructure:
    """Generate a valid game: owners drawn per state, then for each
    state a drawn out-degree of distinct targets (the first edge makes
    the game total by construction) with uniform weights in
    [-W, W] per dimension."""
    rng = Xoshiro256StarStar(spec.seed)
    n = spec.states
    frac = spec.p2_fraction
    states = []
    for i in range(n):
        owner = P2 if rng.below(frac.denominator) < frac.numerator else P1
        states.append((f"s{i}", owner))
    lo, hi = spec.out_degree
    edges = []
    for i in range(n):
        degree = min(n, lo + rng.below(hi - lo + 1))
        targets: list[int] = []
        while len(targets) < degree:
            t = rng.below(n)
            if t not in targets:
                targets.append(t)
        for t in targets:
            w = tuple(
                rng.below(2 * spec.max_abs_weight + 1) - spec.max_abs_weight
                for _ in range(spec.dims)
            )
            edges.append((f"s{i}", f"s{t}", w))
    return GameStructure.build(states, edges, spec.dims, "s0")


# --- window oracle ----------------------------------------------------------

_DONE = "done"


def _fresh_tracker(dims: int, lmax: int, reset: bool):
    if reset:
        return tuple((0, lmax) for _ in range(dims))
    return tuple((0, 0) for _ in range(dims))


def _step_tracker(tracker, weight, lmax, reset):
    """Advance window bookkeeping along one edge; 'overflow' when some
    dimension fails its deadline.  Re-derived here independently of the
    solver modules on purpose."""
    if reset:
        out = []
        for (sig, tau), w in zip(tracker, weight):
            v = sig + w
            if v >= 0:
                out.append((0, lmax))
            elif tau > 1:
                out.append((v, tau - 1))
            else:
                return "overflow"
        return tuple(out)
    out = []
    alive = False
    for st, w in zip(tracker, weight):
        if st is None:
            out.append(None)
            continue
        sig, used = st
        v = sig + w
        if v >= 0:
            out.append(None)
            continue
        if used + 1 >= lmax:
            return "overflow"
        out.append((v, used + 1))
        alive = True
    return tuple(out) if alive else _DONE


@dataclass(eq=False)
class _OracleProduct:
    succs: list[list[int]]
    bad: list[bool]
    p1_choice: list[bool]
    p2_choice: list[bool]
    entry: dict[str, int]
    size: int

    @property
    def preds(self) -> list[list[int]]:
        got = getattr(self, "_preds", None)
        if got is None:
            got = [[] for _ in range(self.size)]
            for v, row in enumerate(self.succs):
                for t in row:
                    got[t].append(v)
            self._preds = got
        return got


def _oracle_product(g: GameStructure, lmax: int, reset: bool, cap: int) -> _OracleProduct:
    keys: dict[tuple, int] = {}
    records: list[tuple] = []

    def intern(key):
        got = keys.get(key)
        if got is None:
            got = len(records)
            if got >= cap:
                raise ResourceLimitError(f"oracle product exceeds cap of {cap}")
            keys[key] = got
            records.append(key)
        return got

    entry = {
        g.names[s]: intern(("w", s, _fresh_tracker(g.dims, lmax, reset)))
        for s in range(g.n)
    }
    succs: list[list[int]] = []
    cursor = 0
    while cursor < len(records):
        while len(succs) < len(records):
            succs.append([])
        key = records[cursor]
        me = cursor
        cursor += 1
        if key[0] == "z":
            if reset:
                succs[me].append(intern(("w", key[1], _fresh_tracker(g.dims, lmax, True))))
            else:
                succs[me].append(me)  # failed forever
            continue
        _, base, tracker = key
        if tracker == _DONE and not reset:
            succs[me].append(me)  # satisfied forever
            continue
        for t, w in g.succ[base]:
            nxt = _step_tracker(tracker, w, lmax, reset)
            if nxt == "overflow":
                succs[me].append(intern(("z", t)))
            else:
                succs[me].append(intern(("w", t, nxt)))
    while len(succs) < len(records):
        succs.append([])
    bad = [k[0] == "z" for k in records]
    p1c, p2c = [], []
    for key, row in zip(records, succs):
        if key[0] == "z" or len(row) < 2:
            p1c.append(False)
            p2c.append(False)
        else:
            owner = g.owner[key[1]]
            p1c.append(owner == P1)
            p2c.append(owner == P2)
    return _OracleProduct(succs, bad, p1c, p2c, entry, len(records))


def _assignment_classes(prod: _OracleProduct, mine: list[bool], start: int) -> Iterator[dict[int, int]]:
    """All restrictions of one side's positional choices to the states
    reached under them, explored depth-first in canonical order."""
    succs = prod.succs

    def explore(assign: dict[int, int]) -> Iterator[dict[int, int]]:
        seen: set[int] = set()
        stack = [start]
        frontier = -1
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            if mine[v]:
                choice = assign.get(v)
                if choice is None:
                    if frontier < 0 or v < frontier:
                        frontier = v
                    continue
                stack.append(succs[v][choice])
            else:
                stack.extend(succs[v])
        if frontier < 0:
            yield assign
            return
        for c in range(len(succs[frontier])):
            child = dict(assign)
            child[frontier] = c
            yield from explore(child)

    yield from explore({})


def _restricted_succs(prod: _OracleProduct, mine: list[bool], assign: dict[int, int], v: int):
    if mine[v]:
        return (prod.succs[v][assign[v]],) if v in assign else ()
    return prod.succs[v]


def _p2_cannot_spoil(prod, assign, start, infinite: bool) -> bool:
    """Fixed P1 choices: can the opponent force overflows (infinitely
    often for the prefix-independent kind, at all for direct kinds)?"""
    succs, bad, mine = prod.succs, prod.bad, prod.p1_choice
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for t in _restricted_succs(prod, mine, assign, v):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    hit = [v for v in seen if bad[v]]
    if not infinite:
        return not hit
    for z in hit:
        inner = set(_restricted_succs(prod, mine, assign, z))
        stack = list(inner)
        while stack:
            v = stack.pop()
            if v == z:
                return False
            for t in _restricted_succs(prod, mine, assign, v):
                if t not in inner:
                    inner.add(t)
                    stack.append(t)
    return True


def _p1_cannot_survive(prod, assign, start, infinite: bool) -> bool:
    """Fixed P2 choices: is there no P1 path settling into an
    overflow-free cycle (reached overflow-free for direct kinds)?"""
    bad, mine = prod.bad, prod.p2_choice
    if bad[start] and not infinite:
        return True
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for t in _restricted_succs(prod, mine, assign, v):
            if t in seen:
                continue
            if bad[t] and not infinite:
                continue  # direct kinds may never even touch an overflow
            seen.add(t)
            stack.append(t)
    region = {v for v in seen if not bad[v]}
    # any cycle within the overflow-free region means P1 survives
    color: dict[int, int] = {}
    for root in sorted(region):
        if color.get(root):
            continue
        dfs = [(root, iter(_restricted_succs(prod, mine, assign, root)))]
        color[root] = 1
        while dfs:
            v, it = dfs[-1]
            advanced = False
            for t in it:
                if t not in region:
                    continue
                c = color.get(t)
                if c is None:
                    color[t] = 1
                    dfs.append((t, iter(_restricted_succs(prod, mine, assign, t))))
                    advanced = True
                    break
                if c == 1:
                    return False
            if not advanced:
                color[v] = 2
                dfs.pop()
    return True


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def tick(self):
        self.used += 1
        if self.used > self.limit:
            raise ResourceLimitError(
                f"oracle exceeded strategy enumeration budget {self.limit}"
            )


def _decide_start(prod, start, infinite: bool, budget: _Budget) -> bool:
    gen1 = _assignment_classes(prod, prod.p1_choice, start)
    gen2 = _assignment_classes(prod, prod.p2_choice, start)
    exhausted = object()
    while True:
        a = next(gen1, exhausted)
        if a is exhausted:
            return False
        budget.tick()
        if _p2_cannot_spoil(prod, a, start, infinite):
            return True
        b = next(gen2, exhausted)
        if b is exhausted:
            return True
        budget.tick()
        if _p1_cannot_survive(prod, b, start, infinite):
            return False


# naive fixpoint evaluation of the oracle product, written against the
# opponent's objective (force overflows once / infinitely often) with
# plain whole-set rescans: deliberately a different algorithm family
# and different code from the arena module

def _forced_closure(prod, target: set[int]) -> set[int]:
    """States from which the overflow-seeking side forces reaching
    ``target`` (zero or more steps).  Worklist over reverse edges."""
    preds = prod.preds
    remaining = [len(row) for row in prod.succs]
    inside = set(target)
    queue = list(target)
    while queue:
        t = queue.pop()
        for v in preds[t]:
            if v in inside:
                continue
            if prod.p1_choice[v]:
                remaining[v] -= 1
                if remaining[v] > 0:
                    continue
            inside.add(v)
            queue.append(v)
    return inside


def _forced_pre(prod, inside: set[int]) -> set[int]:
    out = set()
    for v in range(prod.size):
        row = prod.succs[v]
        if prod.p1_choice[v]:
            if all(t in inside for t in row):
                out.add(v)
        elif any(t in inside for t in row):
            out.add(v)
    return out


def _fixpoint_winners(prod, infinite: bool) -> set[int]:
    """Product states from which the window player survives: the
    overflow-seeker cannot force a visit (direct kinds) or can only
    force finitely many visits (recurrence refinement)."""
    bad = {v for v in range(prod.size) if prod.bad[v]}
    everyone = set(range(prod.size))
    if not infinite:
        return everyone - _forced_closure(prod, bad)
    core = bad
    while True:
        attr = _forced_closure(prod, core)
        again = core & _forced_pre(prod, attr)
        if again == core:
            break
        core = again
    return everyone - _forced_closure(prod, core)


def _oracle_sufficient_window(g: GameStructure) -> int:
    return max(1, (g.n - 1) * (g.n * g.max_abs_weight + 1))


def oracle_window(
    g: GameStructure,
    spec: ObjectiveSpec,
    product_cap: int = DEFAULT_ORACLE_PRODUCT_CAP,
    strategy_budget: int | None = None,
) -> frozenset[str]:
    """Exact window winners by brute force, independent of the solver
    code paths.  Bounded kinds go through the sufficient window size,
    which is exact for them in one dimension.

    The verdict comes from a naive fixpoint evaluation of the oracle's
    own window product.  When ``strategy_budget`` is given, positional
    strategy enumeration with response analysis is run as a second
    route and must agree wherever it finishes within the budget (it is
    exponential and can legitimately run out on adversarial shapes).
    """
    thr = spec.threshold_for(g)
    if any(t != 0 for t in thr):
        raise ValueError("oracle works at threshold zero")
    kind = spec.kind
    if kind in (ObjectiveKind.DIR_BND, ObjectiveKind.BND):
        if g.dims != 1:
            raise ValueError("bounded window oracle is one-dimension only")
        lmax = _oracle_sufficient_window(g)
        reset, infinite = True, kind is ObjectiveKind.BND
    elif kind is ObjectiveKind.GW:
        lmax, reset, infinite = spec.lmax, False, False
    elif kind is ObjectiveKind.DIR_FIX:
        lmax, reset, infinite = spec.lmax, True, False
    elif kind is ObjectiveKind.FIX:
        lmax, reset, infinite = spec.lmax, True, True
    else:
        raise ValueError(f"oracle_window got non-window kind {kind.value}")
    prod = _oracle_product(g, lmax, reset, product_cap)
    winners = _fixpoint_winners(prod, infinite)
    answer = frozenset(s for s, node in prod.entry.items() if node in winners)
    if strategy_budget is not None:
        budget = _Budget(strategy_budget)
        try:
            enumerated = frozenset(
                s
                for s, node in prod.entry.items()
                if _decide_start(prod, node, infinite, budget)
            )
        except ResourceLimitError:
            pass
        else:
            if enumerated != answer:
                raise AssertionError(
                    "oracle routes disagree on\n" + serialize_game(g)
                )
    return answer


# --- classical oracle --------------------------------------------------------

def oracle_classical(
    g: GameStructure,
    kind: ObjectiveKind,
    threshold: Fraction | int = 0,
    budget: int = 14,
) -> frozenset[str]:
    """Winners of a classical objective by double memoryless
    enumeration: both players have positional optima in one dimension,
    and two positional strategies trace out one lasso per start."""
    if g.dims != 1:
        raise ValueError("classical oracle is one-dimension only")
    if g.n > budget:
        raise ResourceLimitError(f"{g.n} states above classical oracle budget {budget}")
    if kind not in (ObjectiveKind.MEAN_INF, ObjectiveKind.MEAN_SUP,
                    ObjectiveKind.TOTAL_INF, ObjectiveKind.TOTAL_SUP):
        raise ValueError(f"oracle_classical got kind {kind.value}")
    spec = ObjectiveSpec(kind, threshold=(Fraction(threshold),))
    p1_states = [s for s in range(g.n) if g.owner[s] == P1]
    p2_states = [s for s in range(g.n) if g.owner[s] == P2]
    p1_opts = [range(len(g.succ[s])) for s in p1_states]
    p2_opts = [range(len(g.succ[s])) for s in p2_states]
    winners = []
    for s in range(g.n):
        won = False
        for pick1 in itertools.product(*p1_opts):
            choice = {st: g.succ[st][c][0] for st, c in zip(p1_states, pick1)}
            good = True
            for pick2 in itertools.product(*p2_opts):
                choice.update(
                    {st: g.succ[st][c][0] for st, c in zip(p2_states, pick2)}
                )
                lasso = _trace_lasso(g, s, choice)
                if not satisfies(g, lasso, spec):
                    good = False
                    break
            if good:
                won = True
                break
        if won:
            winners.append(g.names[s])
    return frozenset(winners)


def _trace_lasso(g: GameStructure, start: int, choice: dict[int, int]) -> Lasso:
    seen: dict[int, int] = {}
    walk: list[int] = []
    cur = start
    while cur not in seen:
        seen[cur] = len(walk)
        walk.append(cur)
        cur = choice[cur]
    cut = seen[cur]
    return Lasso.build(
        [g.names[i] for i in walk[:cut]], [g.names[i] for i in walk[cut:]]
    )


# --- exhaustive tiny-game family ---------------------------------------------

def tiny_game_family(max_states: int = 3) -> Iterator[GameStructure]:
    """Every game with up to ``max_states`` states, out-degree at most
    two and weights in {-1, 0, 1}, one representative per isomorphism
    class under state renaming.  Owners of single-successor states are
    normalized to P1: they never have a choice, so ownership there is
    semantically inert."""
    for n in range(1, max_states + 1):
        options = _state_options(n)
        for combo in itertools.product(options, repeat=n):
            if not _is_canonical(n, combo):
                continue
            states = [(f"s{i}", combo[i][0]) for i in range(n)]
            edges = [
                (f"s{i}", f"s{t}", (w,))
                for i in range(n)
                for t, w in combo[i][1]
            ]
            yield GameStructure.build(states, edges, 1, "s0")


def _state_options(n: int):
    opts = []
    singles = [((t,), (w,)) for t in range(n) for w in (-1, 0, 1)]
    for targets, weights in singles:
        opts.append((P1, tuple(zip(targets, weights))))
    for pair in itertools.combinations(range(n), 2):
        for ws in itertools.product((-1, 0, 1), repeat=2):
            for owner in (P1, P2):
                opts.append((owner, tuple(zip(pair, ws))))
    return opts


def _encode(n: int, combo, perm) -> tuple:
    rows = [None] * n
    for i in range(n):
        owner, edges = combo[i]
        rows[perm[i]] = (owner, tuple(sorted((perm[t], w) for t, w in edges)))
    return tuple(rows)


def _is_canonical(n: int, combo) -> bool:
    me = _encode(n, combo, tuple(range(n)))
    for perm in itertools.permutations(range(n)):
        if _encode(n, combo, perm) < me:
            return False
    return True


def cross_check(corpus=None, checks=None):
    """Run named cross-check suites; see :mod:`wmp.checks`."""
    from .checks import cross_check as run

    return run(corpus, checks)
