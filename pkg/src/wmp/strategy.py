"""Moore-machine strategies: synthesis, exact verification, search.

Verification builds the synchronized product of the game, the machine's
memory and the window counters, then decides reachability (direct
kinds) or cycle membership (prefix-independent kind) of the overflow
states.  Failing verdicts come with a concrete falsifying lasso.

Synthesized strategies are always verified before they are returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import (
    GameStructure,
    InvalidStrategyError,
    Lasso,
    ObjectiveKind,
    ObjectiveSpec,
    P1,
    P2,
    ResourceLimitError,
    eval_lasso,
    validate_lasso,
)
from . import arena
from .window1d import _bounded_layers, _fwmp_layers, sufficient_window, NEG
from .windowkd import (
    DEFAULT_PRODUCT_CAP,
    build_window_product,
    fresh_window,
    step_window,
)

DEFAULT_ENUM_BUDGET = 500_000


class EmptyWinningSetError(ValueError):
    """Synthesis was asked for a strategy but nobody wins."""


@dataclass(frozen=True, eq=False)
class MooreStrategy:
    """Deterministic finite-memory strategy.

    The memory digests the state sequence strictly before the current
    state: to act in ``s`` with memory ``m``, the machine plays
    ``next_action[(m, s)]``; on leaving ``s`` the memory becomes
    ``update[(m, s)]``.
    """

    player: int
    memory: tuple[str, ...]
    initial: str
    update: dict[tuple[str, str], str]
    next_action: dict[tuple[str, str], str]

    @property
    def size(self) -> int:
        return len(self.memory)


def check_strategy(g: GameStructure, strat: MooreStrategy) -> None:
    """Raise :class:`InvalidStrategyError` unless the machine is total
    over memory x states and only plays along existing edges."""
    if strat.player not in (P1, P2):
        raise InvalidStrategyError(f"unknown player {strat.player}")
    if not strat.memory or len(set(strat.memory)) != len(strat.memory):
        raise InvalidStrategyError("memory states must be nonempty and distinct")
    if strat.initial not in strat.memory:
        raise InvalidStrategyError(f"initial memory {strat.initial} not declared")
    mem = set(strat.memory)
    edges = {(a, b) for a, b, _ in g.edges}
    for m in strat.memory:
        for s, owner in g.states:
            nxt = strat.update.get((m, s))
            if nxt is None:
                raise InvalidStrategyError(f"update map misses ({m}, {s})")
            if nxt not in mem:
                raise InvalidStrategyError(f"update ({m}, {s}) -> unknown memory {nxt}")
            if owner == strat.player:
                act = strat.next_action.get((m, s))
                if act is None:
                    raise InvalidStrategyError(f"next_action misses ({m}, {s})")
                if (s, act) not in edges:
                    raise InvalidStrategyError(f"action ({m}, {s}) -> {act} is not an edge")


# --- wstrat text format ---------------------------------------------------

def serialize_strategy(strat: MooreStrategy) -> str:
    lines = ["wstrat 1", f"player {strat.player}", "memory " + " ".join(strat.memory),
             f"init {strat.initial}"]
    for (m, s), m2 in sorted(strat.update.items()):
        lines.append(f"update {m} {s} {m2}")
    for (m, s), t in sorted(strat.next_action.items()):
        lines.append(f"act {m} {s} {t}")
    return "\n".join(lines) + "\n"


def parse_strategy(text: str) -> MooreStrategy:
    from .model import ParseError

    player = None
    memory: tuple[str, ...] | None = None
    initial = None
    update: dict[tuple[str, str], str] = {}
    action: dict[tuple[str, str], str] = {}
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = [t for t in raw.split("#", 1)[0].split()]
        if not toks:
            continue
        word = toks[0]
        if not saw_header:
            if toks != ["wstrat", "1"]:
                raise ParseError("expected header 'wstrat 1'", lineno)
            saw_header = True
        elif word == "player" and len(toks) == 2 and toks[1] in ("1", "2"):
            player = int(toks[1])
        elif word == "memory" and len(toks) >= 2:
            memory = tuple(toks[1:])
        elif word == "init" and len(toks) == 2:
            initial = toks[1]
        elif word == "update" and len(toks) == 4:
            update[(toks[1], toks[2])] = toks[3]
        elif word == "act" and len(toks) == 4:
            action[(toks[1], toks[2])] = toks[3]
        else:
            raise ParseError(f"bad wstrat line {raw!r}", lineno)
    if not saw_header:
        raise ParseError("empty input, expected 'wstrat 1'", 1)
    if player is None or memory is None or initial is None:
        raise InvalidStrategyError("wstrat needs player, memory and init")
    return MooreStrategy(player, memory, initial, update, action)


# --- exact verification ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class Verdict:
    """Outcome of a verification: on failure, ``counterexample`` is a
    lasso consistent with the machine on which the machine's goal fails
    (for P1 machines the objective is violated; for P2 machines it is,
    on the contrary, satisfied)."""

    passed: bool
    counterexample: Lasso | None


_DONE = "done"


def _start_tracker(dims: int, lmax: int, reset: bool):
    if reset:
        return fresh_window(dims, lmax)
    return tuple((0, 0) for _ in range(dims))


def _step_noreset(tr, weight, lmax):
    """GW tracking: per dimension None once closed, else (sum, used).
    Returns the new tracker, 'overflow', or DONE when all close."""
    out = []
    alive = False
    for st, w in zip(tr, weight):
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


def _machine_product(g, strat, spec, starts, product_cap):
    """Reachable synchronized product; nodes are
    ('w', base, mem, tracker) with detour nodes ('z', base, mem) for
    overflow events.  Branching is the opponent's only."""
    reset = spec.kind in (ObjectiveKind.DIR_FIX, ObjectiveKind.FIX)
    lmax = spec.lmax
    names = g.names
    idx: dict[tuple, int] = {}
    nodes: list[tuple] = []
    succs: list[list[int]] = []

    def intern(node):
        got = idx.get(node)
        if got is None:
            got = len(nodes)
            if got >= product_cap:
                raise ResourceLimitError(
                    f"verification product exceeds cap of {product_cap} nodes"
                )
            idx[node] = got
            nodes.append(node)
            succs.append([])
        return got

    start_nodes = [
        intern(("w", g.index[s], strat.initial, _start_tracker(g.dims, lmax, reset)))
        for s in starts
    ]
    cursor = 0
    while cursor < len(nodes):
        node = nodes[cursor]
        me = cursor
        cursor += 1
        if node[0] == "z":
            _, b, m = node
            tracker = fresh_window(g.dims, lmax) if reset else _DONE
            succs[me].append(intern(("w", b, m, tracker)))
            continue
        _, b, m, tr = node
        m2 = strat.update[(m, names[b])]
        if g.owner[b] == strat.player:
            act = strat.next_action[(m, names[b])]
            moves = [(g.index[act], g.edge_weight[(b, g.index[act])])]
        else:
            moves = list(g.succ[b])
        for t, w in moves:
            if tr == _DONE:
                succs[me].append(intern(("w", t, m2, _DONE)))
                continue
            if reset:
                nxt = step_window(tr, w, lmax)
                if nxt is None:
                    succs[me].append(intern(("z", t, m2)))
                else:
                    succs[me].append(intern(("w", t, m2, nxt)))
            else:
                nxt = _step_noreset(tr, w, lmax)
                if nxt == "overflow":
                    succs[me].append(intern(("z", t, m2)))
                else:
                    succs[me].append(intern(("w", t, m2, nxt)))
    overflow = frozenset(i for i, nd in enumerate(nodes) if nd[0] == "z")
    return nodes, succs, overflow, start_nodes


def _bfs_path(succs, sources, goals, blocked=frozenset()):
    """Parent-linked BFS; returns the node list from a source to the
    first goal hit, or None."""
    parent = {s: None for s in sources if s not in blocked}
    queue = list(parent)
    for s in queue:
        if s in goals:
            return [s]
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for t in succs[v]:
            if t in parent or t in blocked:
                continue
            parent[t] = v
            if t in goals:
                path = [t]
                while path[-1] is not None and parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                path.reverse()
                return path
            queue.append(t)
    return None


def _find_cycle(succs, inside):
    """Some cycle fully inside ``inside`` as a node list, or None."""
    color = {}
    for root in sorted(inside):
        if color.get(root):
            continue
        stack = [(root, iter(succs[root]))]
        color[root] = 1
        trail = [root]
        while stack:
            v, it = stack[-1]
            advanced = False
            for t in it:
                if t not in inside:
                    continue
                c = color.get(t)
                if c is None:
                    color[t] = 1
                    stack.append((t, iter(succs[t])))
                    trail.append(t)
                    advanced = True
                    break
                if c == 1:
                    return trail[trail.index(t):]
            if not advanced:
                color[v] = 2
                stack.pop()
                trail.pop()
    return None


def _project(g, nodes, node_path):
    return [g.names[nodes[i][1]] for i in node_path if nodes[i][0] == "w"]


def _reach_set(succs, sources, blocked=frozenset()):
    seen = set(s for s in sources if s not in blocked)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for t in succs[v]:
            if t not in seen and t not in blocked:
                seen.add(t)
                stack.append(t)
    return seen


def verify_strategy(
    g: GameStructure,
    strat: MooreStrategy,
    spec: ObjectiveSpec,
    starts=None,
    product_cap: int = DEFAULT_PRODUCT_CAP,
) -> Verdict:
    """Exact model check of a Moore machine against a window objective.

    Supported kinds: gw, dfwmp, fwmp (bounded kinds are checked through
    their sufficient-window substitution by the synthesizers).  For a
    P1 machine, passing means the objective holds on every consistent
    play from every start; for a P2 machine, that it fails on all of
    them.  Starts default to the game's initial state.
    """
    if spec.kind not in (ObjectiveKind.GW, ObjectiveKind.DIR_FIX, ObjectiveKind.FIX):
        raise ValueError(f"verify_strategy does not handle kind {spec.kind.value}")
    if any(t != 0 for t in spec.threshold_for(g)):
        raise ValueError("verify at threshold zero; normalize the game first")
    check_strategy(g, strat)
    starts = tuple(starts) if starts is not None else (g.init,)
    nodes, succs, overflow, start_nodes = _machine_product(
        g, strat, spec, starts, product_cap
    )
    direct = spec.kind in (ObjectiveKind.GW, ObjectiveKind.DIR_FIX)
    if strat.player == P1:
        return _verdict_p1(g, spec, nodes, succs, overflow, start_nodes, direct)
    return _verdict_p2(g, spec, nodes, succs, overflow, start_nodes, direct)


def _verdict_p1(g, spec, nodes, succs, overflow, start_nodes, direct) -> Verdict:
    if direct:
        path = _bfs_path(succs, start_nodes, overflow)
        if path is None:
            return Verdict(True, None)
        lasso = _extend_to_lasso(g, nodes, succs, path)
        return Verdict(False, _shrink(g, lasso, spec, want=False))
    reach = _reach_set(succs, start_nodes)
    for z in sorted(overflow & reach):
        back = _bfs_path(succs, set(succs[z]) & reach, {z})
        if back is None:
            continue
        stem_nodes = _bfs_path(succs, start_nodes, {z})
        stem = _project(g, nodes, stem_nodes[:-1])
        # the cycle is z -> succ(z) -> ... -> z, listed once from z
        cycle = _project(g, nodes, [z] + back[:-1])
        lasso = Lasso.build(stem, cycle)
        return Verdict(False, _shrink(g, lasso, spec, want=False))
    return Verdict(True, None)


def _verdict_p2(g, spec, nodes, succs, overflow, start_nodes, direct) -> Verdict:
    if direct:
        reach = _reach_set(succs, start_nodes, blocked=overflow)
    else:
        reach = _reach_set(succs, start_nodes) - overflow
    cyc = _find_cycle(succs, reach)
    if cyc is None:
        return Verdict(True, None)
    entry = cyc[0]
    blocked = overflow if direct else frozenset()
    stem_nodes = _bfs_path(succs, start_nodes, {entry}, blocked=blocked)
    stem = _project(g, nodes, stem_nodes[:-1])
    cycle = _project(g, nodes, cyc)
    lasso = Lasso.build(stem, cycle)
    return Verdict(False, _shrink(g, lasso, spec, want=True))


def _extend_to_lasso(g, nodes, succs, path) -> Lasso:
    """Extend a finite product path into a lasso by following first
    successors until a product node repeats."""
    seen = {p: i for i, p in enumerate(path)}
    cur = path[-1]
    walk = list(path)
    while True:
        nxt = succs[cur][0]
        if nxt in seen:
            cut = seen[nxt]
            stem = _project(g, nodes, walk[:cut])
            cycle = _project(g, nodes, walk[cut:])
            return Lasso.build(stem, cycle)
        seen[nxt] = len(walk)
        walk.append(nxt)
        cur = nxt


def _shrink(g, lasso: Lasso, spec: ObjectiveSpec, want: bool) -> Lasso:
    """Minimize a witness lasso by trimming the stem head and collapsing
    repeated cycle states, preserving the verdict."""

    def keeps(cand: Lasso) -> bool:
        try:
            validate_lasso(g, cand)
        except Exception:
            return False
        return eval_lasso(g, cand, spec) is want

    assert keeps(lasso), "witness lasso does not witness"
    changed = True
    while changed:
        changed = False
        while lasso.stem:
            cand = Lasso(lasso.stem[1:], lasso.cycle)
            if keeps(cand):
                lasso = cand
                changed = True
            else:
                break
        n = len(lasso.cycle)
        for i in range(n):
            for j in range(i + 1, n):
                if lasso.cycle[i] == lasso.cycle[j]:
                    cand = Lasso(lasso.stem, lasso.cycle[:i] + lasso.cycle[j:])
                    if cand.cycle and keeps(cand):
                        lasso = cand
                        changed = True
                        break
            if changed:
                break
    return lasso


# --- synthesis: one-dimension fixed window --------------------------------

def synth_fwmp_1d(g: GameStructure, lmax: int) -> MooreStrategy:
    """P1 strategy winning the fixed window objective from every winning
    state, with plain step-counter memory of size lmax.

    Inside a direct region the machine follows the good-window table:
    it keeps a countdown of the steps left on the current closing plan
    and replans from the current state whenever the plan expires or its
    table value turns negative (which only happens after the running
    sum has already turned non-negative, so cutting there is safe).
    Attractor states play memoryless reachability moves.
    """
    layers = _fwmp_layers(g, lmax)
    winning = frozenset().union(*[lay.attracted_ids for lay in layers]) if layers else frozenset()
    if not winning:
        raise EmptyWinningSetError("fixed window winning set is empty")

    memory = tuple(f"r{i}" for i in range(lmax))
    update: dict[tuple[str, str], str] = {}
    action: dict[tuple[str, str], str] = {}

    role: dict[str, tuple] = {}
    for lay in layers:
        for s in lay.direct_ids:
            role[s] = ("direct", lay)
        for s in lay.attracted_ids - lay.direct_ids:
            role[s] = ("attr", lay)

    def plan(lay, s, r):
        table = lay.table
        si = lay.sub.index[s]
        if r >= 1 and table.value(r, si) >= 0:
            return r
        for i in range(1, lmax + 1):
            if table.value(i, si) >= 0:
                return i
        raise AssertionError(f"state {s} lost its certificate")

    def argmax_edge(lay, s, depth):
        table = lay.table
        sub = lay.sub
        si = sub.index[s]
        cap = lmax * sub.max_abs_weight + 1
        best_t, best_v = None, NEG
        for t, w in sub.succ[si]:
            if t not in table.live:
                continue
            v = table.value(depth - 1, t)
            cand = w[0] if v == NEG else max(w[0], w[0] + v)
            cand = min(cap, max(-cap, cand))
            if cand > best_v:
                best_v, best_t = cand, t
        assert best_t is not None
        return sub.names[best_t]

    for r, mname in enumerate(memory):
        for s, owner in g.states:
            kind = role.get(s, ("lose", None))[0]
            if kind == "direct":
                lay = role[s][1]
                depth = plan(lay, s, r)
                update[(mname, s)] = memory[depth - 1]
                if owner == P1:
                    action[(mname, s)] = argmax_edge(lay, s, depth)
            else:
                update[(mname, s)] = memory[0]
                if owner == P1:
                    if kind == "attr":
                        action[(mname, s)] = role[s][1].attr_moves[s]
                    else:
                        action[(mname, s)] = g.names[g.succ[g.index[s]][0][0]]

    strat = MooreStrategy(P1, memory, memory[0], update, action)
    verdict = verify_strategy(
        g, strat, ObjectiveSpec(ObjectiveKind.FIX, lmax=lmax), starts=sorted(winning)
    )
    if not verdict.passed:
        raise AssertionError("synthesized fixed-window strategy failed verification")
    return strat


# --- synthesis: bounded window ---------------------------------------------

def synth_bwmp(g: GameStructure, budget: int | None = None) -> MooreStrategy:
    """Memoryless P1 strategy winning the bounded window objective from
    every winning state: attractor moves toward the layered
    total-payoff regions, uniform total-payoff moves inside them.
    Verified at the sufficient window size, which captures the bounded
    objective exactly."""
    from .classical import DEFAULT_ORACLE_BUDGET

    budget = DEFAULT_ORACLE_BUDGET if budget is None else budget
    winning, layers = _bounded_layers(g, budget)
    if not winning:
        raise EmptyWinningSetError("bounded window winning set is empty")
    action: dict[tuple[str, str], str] = {}
    assigned: set[str] = set()
    for lay in layers:
        for s, t in lay.tp_moves.items():
            if s not in assigned:
                action[("m0", s)] = t
                assigned.add(s)
        for s, t in lay.attr_moves.items():
            if s not in assigned:
                action[("m0", s)] = t
                assigned.add(s)
    for s, owner in g.states:
        if owner == P1 and s not in assigned:
            action[("m0", s)] = g.names[g.succ[g.index[s]][0][0]]
    update = {("m0", s): "m0" for s, _ in g.states}
    strat = MooreStrategy(P1, ("m0",), "m0", update, action)
    verdict = verify_strategy(
        g,
        strat,
        ObjectiveSpec(ObjectiveKind.FIX, lmax=sufficient_window(g)),
        starts=sorted(winning),
    )
    if not verdict.passed:
        raise AssertionError("synthesized bounded-window strategy failed verification")
    return strat


# --- synthesis: multi-dimension fixed window -------------------------------

def synth_fwmp_k(
    g: GameStructure,
    lmax: int,
    direct: bool = False,
    product_cap: int = DEFAULT_PRODUCT_CAP,
) -> MooreStrategy:
    """P1 strategy for the (direct) fixed window objective in any
    dimension count.  The memory is the reachable window-counter space:
    each memory state names a product state, and the machine plays the
    positional product strategy."""
    product = build_window_product(g, lmax, None, product_cap)
    pg = product.game
    if direct:
        win, moves = arena.safety_with_moves(pg, pg.all_indices - product.bad)
    else:
        win, moves = arena.cobuchi_with_moves(pg, product.bad)
    winning = sorted(s for s, q in product.entry.items() if q in win)
    if not winning:
        raise EmptyWinningSetError("window winning set is empty")

    # transition function on memory: delta[(q, base target)] -> q'
    delta: dict[tuple[int, str], int] = {}
    for qi in range(pg.n):
        if qi in product.bad:
            continue
        for t, _ in pg.succ[qi]:
            base = product.base_of[t]
            delta[(qi, base)] = product.entry[base] if t in product.bad else t

    mem_ids = {qi: pg.names[qi] for qi in range(pg.n) if qi not in product.bad}
    memory = ("boot",) + tuple(mem_ids[qi] for qi in sorted(mem_ids))
    back = {v: k for k, v in mem_ids.items()}

    def at_state(mname: str, s: str) -> int:
        if mname == "boot":
            return product.entry[s]
        return delta.get((back[mname], s), product.entry[s])

    update: dict[tuple[str, str], str] = {}
    action: dict[tuple[str, str], str] = {}
    for mname in memory:
        for s, owner in g.states:
            q = at_state(mname, s)
            update[(mname, s)] = mem_ids[q]
            if owner != P1:
                continue
            if q in win and q in moves:
                action[(mname, s)] = product.base_of[moves[q]]
            else:
                action[(mname, s)] = g.names[g.succ[g.index[s]][0][0]]

    strat = MooreStrategy(P1, memory, "boot", update, action)
    kind = ObjectiveKind.DIR_FIX if direct else ObjectiveKind.FIX
    verdict = verify_strategy(
        g, strat, ObjectiveSpec(kind, lmax=lmax), starts=winning, product_cap=product_cap
    )
    if not verdict.passed:
        raise AssertionError("synthesized product strategy failed verification")
    return strat


# --- bounded-memory search --------------------------------------------------

def min_memory_search(
    g: GameStructure,
    spec: ObjectiveSpec,
    player: int,
    bound: int,
    starts=None,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> MooreStrategy | None:
    """Exhaustively search for a winning Moore machine with at most
    ``bound`` memory states (winning for P2 means spoiling the
    objective).  Machines are deduplicated modulo memory renaming and
    unreachable memory; the search is deterministic and returns the
    first verified machine in canonical order, or None.

    ``starts`` defaults to every state: the machine must win from all
    of them.  Raises :class:`ResourceLimitError` past ``enum_budget``
    candidates.
    """
    starts = tuple(starts) if starts is not None else g.names
    owned = [s for s, o in g.states if o == player]
    succ_names = {
        s: [g.names[t] for t, _ in g.succ[g.index[s]]] for s, _ in g.states
    }
    tried = 0
    seen_sigs: set[tuple] = set()
    for size in range(1, bound + 1):
        memory = tuple(f"m{i}" for i in range(size))
        act_slots = [(m, s) for m in memory for s in owned]
        upd_slots = [(m, s) for m in memory for s, _ in g.states]
        act_options = [succ_names[s] for _, s in act_slots]
        upd_options = [list(memory)] * len(upd_slots)
        for combo in itertools.product(*(act_options + upd_options)):
            tried += 1
            if tried > enum_budget:
                raise ResourceLimitError(
                    f"memory search exceeded enumeration budget {enum_budget}"
                )
            acts = dict(zip(act_slots, combo[: len(act_slots)]))
            upds = dict(zip(upd_slots, combo[len(act_slots):]))
            sig = _machine_signature(g, memory, upds, acts, owned)
            if sig in seen_sigs:
                continue
            seen_sigs.add(sig)
            cand = MooreStrategy(player, memory, memory[0], upds, acts)
            verdict = verify_strategy(g, cand, spec, starts=starts)
            if verdict.passed:
                return cand
    return None


def _machine_signature(g, memory, update, action, owned):
    """Canonical form modulo renaming of reachable memory states."""
    order = {memory[0]: 0}
    queue = [memory[0]]
    rows = []
    while queue:
        m = queue.pop(0)
        row = []
        for s, _ in g.states:
            m2 = update[(m, s)]
            if m2 not in order:
                order[m2] = len(order)
                queue.append(m2)
            row.append(order[m2])
        acts = tuple(action[(m, s)] for s in owned)
        rows.append((tuple(row), acts))
    return tuple(rows)
