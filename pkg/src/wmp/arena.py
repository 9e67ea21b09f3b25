"""Generic fixpoint machinery on arenas.

State sets are frozensets of indices into the canonical state order of
the game at hand.  All functions are pure; subgames are fresh
immutable structures whose state ids are preserved.

Attractor computations assume a total game (every state has an
outgoing edge).  Subgame restriction can create dead ends; they are
reported to the caller, never silently removed, and an opponent dead
end is never considered attracted by vacuity.
"""

from __future__ import annotations

from collections import deque

from .model import P1, P2, GameStructure

StateSet = frozenset[int]


def attractor(g: GameStructure, player: int, target: StateSet) -> StateSet:
    """Least set of states from which ``player`` can force reaching
    ``target``: player states with some edge in, opponent states with
    all edges in.  O(|E|) via per-state outgoing counters."""
    win, _ = attractor_with_moves(g, player, target)
    return win


def attractor_with_moves(
    g: GameStructure, player: int, target: StateSet
) -> tuple[StateSet, dict[int, int]]:
    """Attractor plus, for each attracted player-owned state outside the
    target, one edge target that decreases the attraction rank."""
    pending = [len(g.succ[s]) for s in range(g.n)]
    inside = set(target)
    moves: dict[int, int] = {}
    queue = deque(sorted(target))
    while queue:
        t = queue.popleft()
        for s in g.preds[t]:
            if s in inside:
                continue
            if g.owner[s] == player:
                inside.add(s)
                moves[s] = t
                queue.append(s)
            else:
                pending[s] -= 1
                if pending[s] == 0:
                    inside.add(s)
                    queue.append(s)
    return frozenset(inside), moves


def reachable(g: GameStructure, starts: StateSet) -> StateSet:
    seen = set(starts)
    stack = list(starts)
    while stack:
        s = stack.pop()
        for t, _ in g.succ[s]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)


def subgame(g: GameStructure, keep: StateSet) -> tuple[GameStructure, StateSet]:
    """Restriction of ``g`` to ``keep``: kept states in canonical order,
    edges with both endpoints kept.  Returns the restricted game and the
    set of its dead-end states (indices in the new game); callers decide
    how to treat them.  The init is preserved when kept, else the first
    kept state stands in (solvers never read it)."""
    if not keep:
        raise ValueError("subgame of an empty state set")
    names = {g.names[i] for i in keep}
    states = tuple((s, o) for s, o in g.states if s in names)
    edges = tuple((a, b, w) for a, b, w in g.edges if a in names and b in names)
    init = g.init if g.init in names else states[0][0]
    sub = GameStructure(states, edges, g.dims, init)
    has_out = {a for a, _, _ in edges}
    dead = frozenset(i for i, (s, _) in enumerate(states) if s not in has_out)
    return sub, dead


def solve_safety(g: GameStructure, safe: StateSet) -> StateSet:
    """States from which P1 keeps the play inside ``safe`` forever:
    the complement of the P2 attractor of the unsafe states."""
    win, _ = safety_with_moves(g, safe)
    return win


def safety_with_moves(
    g: GameStructure, safe: StateSet
) -> tuple[StateSet, dict[int, int]]:
    """Safety winners plus, for each winning P1 state, one edge that
    stays inside the winning region."""
    bad = attractor(g, P2, g.all_indices - safe)
    win = frozenset(safe) - bad
    moves: dict[int, int] = {}
    for s in win:
        if g.owner[s] == P1:
            for t, _ in g.succ[s]:
                if t in win:
                    moves[s] = t
                    break
    return win, moves


def solve_cobuchi(g: GameStructure, bad: StateSet) -> StateSet:
    """States from which P1 can ensure ``bad`` is visited only finitely
    often.  Iterates: take the safety winners of the current subgame,
    attract to them, peel the attractor off, repeat until no growth."""
    win, _ = cobuchi_with_moves(g, bad)
    return win


def cobuchi_with_moves(
    g: GameStructure, bad: StateSet
) -> tuple[StateSet, dict[int, int]]:
    """Co-Buchi winners plus one winning move per P1 state: an attractor
    move while heading for the safe core of its layer, a safety move
    inside it."""
    result: set[int] = set()
    moves: dict[int, int] = {}
    live = g.all_indices
    while live:
        sub, _ = subgame(g, live)
        back = [g.index[s] for s in sub.names]  # sub index -> g index
        sub_bad = frozenset(i for i in range(sub.n) if back[i] in bad)
        core, core_moves = safety_with_moves(sub, frozenset(range(sub.n)) - sub_bad)
        if not core:
            break
        attr, attr_moves = attractor_with_moves(sub, P1, core)
        for s, t in attr_moves.items():
            if sub.owner[s] == P1:
                moves[back[s]] = back[t]
        for s, t in core_moves.items():
            moves[back[s]] = back[t]
        result.update(back[s] for s in attr)
        live = live - frozenset(back[s] for s in attr)
    return frozenset(result), moves
