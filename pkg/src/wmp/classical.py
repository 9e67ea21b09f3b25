"""One-dimension mean-payoff and supremum total-payoff solvers.

The mean-payoff values come from finite-horizon optimal-sum iteration
with exact rational rounding.  The total-payoff winner computation is a
reference backend built for exactness at desk scale, not speed: it
enumerates the memoryless strategies of one player (memoryless optima
exist for both players) and computes the opponent's best response by
lasso analysis on the induced one-player graph.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

from .model import P1, P2, GameStructure, ResourceLimitError

DEFAULT_ORACLE_BUDGET = 14


def _require_dim1(g: GameStructure) -> None:
    if g.dims != 1:
        raise ValueError(f"one-dimension solver got a game with k={g.dims}")


def _require_budget(g: GameStructure, budget: int) -> None:
    if g.n > budget:
        raise ResourceLimitError(
            f"game has {g.n} states, total-payoff backend budget is {budget}"
        )


def mp_value(g: GameStructure) -> dict[str, Fraction]:
    """Exact mean-payoff game value per state.

    Runs optimal-sum iteration for N = 4*|S|^3*W steps (N = 1 when
    W = 0), then rounds v_N/N to the closest rational with denominator
    at most |S|; the horizon makes that rounding unambiguous.
    """
    _require_dim1(g)
    n = g.n
    horizon = max(1, 4 * n**3 * g.max_abs_weight)
    succ = [[(t, w[0]) for t, w in g.succ[s]] for s in range(n)]
    if any(not row for row in succ):
        raise ValueError("mean-payoff values need a total game")
    val = [0] * n
    maximize = [g.owner[s] == P1 for s in range(n)]
    for _ in range(horizon):
        cur = [0] * n
        for s in range(n):
            opts = [w + val[t] for t, w in succ[s]]
            cur[s] = max(opts) if maximize[s] else min(opts)
        val = cur
    out: dict[str, Fraction] = {}
    gap = Fraction(1, 2 * n * (n - 1)) if n > 1 else None
    for s in range(n):
        approx = Fraction(val[s], horizon)
        exact = approx.limit_denominator(n)
        if gap is not None and abs(exact - approx) > gap:
            raise AssertionError(
                f"horizon too short: {approx} not within {gap} of a small rational"
            )
        out[g.names[s]] = exact
    return out


def mp_threshold_win(g: GameStructure) -> frozenset[str]:
    """States with mean-payoff game value >= 0 (inf and sup coincide)."""
    return frozenset(s for s, v in mp_value(g).items() if v >= 0)


# --- supremum total-payoff reference backend -----------------------------

def _simple_cycles(n: int, adj: list[list[int]]) -> list[tuple[int, ...]]:
    """All simple cycles, each reported once, rooted at its minimal node."""
    cycles: list[tuple[int, ...]] = []
    path: list[int] = []
    onpath = [False] * n

    def dfs(v: int, root: int) -> None:
        path.append(v)
        onpath[v] = True
        for t in adj[v]:
            if t < root:
                continue
            if t == root:
                cycles.append(tuple(path))
            elif not onpath[t]:
                dfs(t, root)
        path.pop()
        onpath[v] = False

    for root in range(n):
        dfs(root, root)
    return cycles


def _reach(n: int, adj: list[list[int]], start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for t in adj[v]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def _shortest_sums(
    n: int, adj: list[list[int]], wt: dict[tuple[int, int], int], inside: set[int], start: int
) -> dict[int, int]:
    """Minimal walk sums from start within ``inside``; only valid when
    the region contains no strictly negative cycle."""
    dist = {start: 0}
    for _ in range(len(inside)):
        changed = False
        for v in list(dist):
            dv = dist[v]
            for t in adj[v]:
                if t not in inside:
                    continue
                cand = dv + wt[(v, t)]
                if cand < dist.get(t, cand + 1):
                    dist[t] = cand
                    changed = True
        if not changed:
            break
    return dist


def _spoiled_starts(
    n: int, adj: list[list[int]], wt: dict[tuple[int, int], int]
) -> frozenset[int]:
    """Starts in a one-player graph from which its controller can keep
    the supremum total payoff strictly below zero.

    That holds iff a strictly negative simple cycle is reachable, or a
    zero-sum simple cycle is reachable by a walk such that every
    recurring prefix sum stays at most -1 along the eventual period.
    """
    cycles = _simple_cycles(n, adj)
    neg_nodes: set[int] = set()
    # best (smallest) ceiling requirement per zero-cycle entry point
    req: dict[int, int] = {}
    for cyc in cycles:
        L = len(cyc)
        ws = [wt[(cyc[i], cyc[(i + 1) % L])] for i in range(L)]
        total = sum(ws)
        if total < 0:
            neg_nodes.update(cyc)
        elif total == 0:
            for j in range(L):
                peak = 0
                run = 0
                for i in range(L - 1):
                    run += ws[(j + i) % L]
                    if run > peak:
                        peak = run
                entry = cyc[j]
                if peak < req.get(entry, peak + 1):
                    req[entry] = peak
    spoiled: set[int] = set()
    for s in range(n):
        region = _reach(n, adj, s)
        if region & neg_nodes:
            spoiled.add(s)
            continue
        dist = _shortest_sums(n, adj, wt, region, s)
        for c, peak in req.items():
            if c in dist and dist[c] + peak <= -1:
                spoiled.add(s)
                break
    return frozenset(spoiled)


def _p1_choice_lists(g: GameStructure) -> tuple[list[int], list[list[int]]]:
    owners = [s for s in range(g.n) if g.owner[s] == P1]
    return owners, [list(range(len(g.succ[s]))) for s in owners]


def _induced_graph(
    g: GameStructure, p1_states: list[int], picks: tuple[int, ...]
) -> tuple[list[list[int]], dict[tuple[int, int], int]]:
    adj: list[list[int]] = []
    wt: dict[tuple[int, int], int] = {}
    chosen = dict(zip(p1_states, picks))
    for s in range(g.n):
        if s in chosen:
            t, w = g.succ[s][chosen[s]]
            adj.append([t])
            wt[(s, t)] = w[0]
        else:
            row = []
            for t, w in g.succ[s]:
                row.append(t)
                wt[(s, t)] = w[0]
            adj.append(row)
    return adj, wt


@lru_cache(maxsize=4096)
def _tp_sup_win_cached(g: GameStructure, budget: int) -> frozenset[str]:
    _require_dim1(g)
    _require_budget(g, budget)
    p1_states, options = _p1_choice_lists(g)
    everyone = frozenset(range(g.n))
    winners: set[int] = set()
    for picks in itertools.product(*options):
        adj, wt = _induced_graph(g, p1_states, picks)
        winners |= everyone - _spoiled_starts(g.n, adj, wt)
        if len(winners) == g.n:
            break
    return frozenset(g.names[i] for i in winners)


def tp_sup_win(g: GameStructure, budget: int = DEFAULT_ORACLE_BUDGET) -> frozenset[str]:
    """States from which P1 wins the supremum total-payoff objective at
    threshold zero.  Reference backend: P1 memoryless enumeration with
    P2 best responses by lasso analysis; exact but budget-limited."""
    return _tp_sup_win_cached(g, budget)


def neg_sup_tp(g: GameStructure, budget: int = DEFAULT_ORACLE_BUDGET) -> frozenset[str]:
    """States from which P2 forces a strictly negative supremum total
    payoff: the complement of :func:`tp_sup_win` by determinacy."""
    return frozenset(g.names) - tp_sup_win(g, budget)


def uniform_tp_strategy(
    g: GameStructure, budget: int = DEFAULT_ORACLE_BUDGET
) -> dict[str, str]:
    """One memoryless P1 strategy winning supremum total-payoff from
    every state of tp_sup_win(g) simultaneously.  Such a strategy exists
    by positional determinacy of the objective."""
    target = tp_sup_win(g, budget)
    target_idx = {g.index[s] for s in target}
    p1_states, options = _p1_choice_lists(g)
    everyone = frozenset(range(g.n))
    for picks in itertools.product(*options):
        adj, wt = _induced_graph(g, p1_states, picks)
        if everyone - _spoiled_starts(g.n, adj, wt) >= target_idx:
            return {
                g.names[s]: g.names[g.succ[s][c][0]]
                for s, c in zip(p1_states, picks)
            }
    raise AssertionError("no uniform memoryless total-payoff strategy found")


# --- P2-side enumeration, used for determinacy cross-checks ---------------

def _survivor_starts(
    n: int, adj: list[list[int]], wt: dict[tuple[int, int], int]
) -> frozenset[int]:
    """Starts in a one-player graph from which its controller can keep
    the supremum total payoff at least zero (dual of _spoiled_starts)."""
    cycles = _simple_cycles(n, adj)
    pos_nodes: set[int] = set()
    gain: dict[int, int] = {}
    for cyc in cycles:
        L = len(cyc)
        ws = [wt[(cyc[i], cyc[(i + 1) % L])] for i in range(L)]
        total = sum(ws)
        if total > 0:
            pos_nodes.update(cyc)
        elif total == 0:
            for j in range(L):
                peak = 0
                run = 0
                for i in range(L - 1):
                    run += ws[(j + i) % L]
                    if run > peak:
                        peak = run
                entry = cyc[j]
                if peak > gain.get(entry, peak - 1):
                    gain[entry] = peak
    out: set[int] = set()
    for s in range(n):
        region = _reach(n, adj, s)
        if region & pos_nodes:
            out.add(s)
            continue
        # maximal walk sums are finite without positive cycles
        neg_wt = {e: -w for e, w in wt.items()}
        dist = _shortest_sums(n, adj, neg_wt, region, s)
        for c, peak in gain.items():
            if c in dist and -dist[c] + peak >= 0:
                out.add(s)
                break
    return frozenset(out)


def tp_sup_win_p2_view(
    g: GameStructure, budget: int = DEFAULT_ORACLE_BUDGET
) -> frozenset[str]:
    """tp_sup_win computed from the other side: enumerate P2 memoryless
    strategies and keep the states where P1 always has a surviving
    response.  Must agree with :func:`tp_sup_win` by determinacy."""
    _require_dim1(g)
    _require_budget(g, budget)
    p2_states = [s for s in range(g.n) if g.owner[s] == P2]
    options = [list(range(len(g.succ[s]))) for s in p2_states]
    winners = set(range(g.n))
    for picks in itertools.product(*options):
        adj, wt = _induced_graph_p2(g, p2_states, picks)
        winners &= _survivor_starts(g.n, adj, wt)
        if not winners:
            break
    return frozenset(g.names[i] for i in winners)


def _induced_graph_p2(
    g: GameStructure, p2_states: list[int], picks: tuple[int, ...]
) -> tuple[list[list[int]], dict[tuple[int, int], int]]:
    adj: list[list[int]] = []
    wt: dict[tuple[int, int], int] = {}
    chosen = dict(zip(p2_states, picks))
    for s in range(g.n):
        if s in chosen:
            t, w = g.succ[s][chosen[s]]
            adj.append([t])
            wt[(s, t)] = w[0]
        else:
            row = []
            for t, w in g.succ[s]:
                row.append(t)
                wt[(s, t)] = w[0]
            adj.append(row)
    return adj, wt
