"""Multi-dimension fixed window solving via a window-counter product.

The product tracks, per dimension, the running negative sum since the
last reset and the steps remaining before the window overflows.  An
overflow routes through a designated bad state (one per base state)
that resets all counters.  Fixed window winners are then the co-Buchi
winners over the bad set; the direct variant uses safety instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .model import GameStructure, P1, ResourceLimitError, SolveReport
from . import arena

DEFAULT_PRODUCT_CAP = 5_000_000

WindowState = tuple[tuple[int, int], ...]  # per dimension: (sum, steps left)


@dataclass(frozen=True, eq=False)
class WindowProduct:
    """Reachable window-counter product of a game.

    ``game`` is an unweighted encoding (dims 1, all weights zero) whose
    state ids are q0, q1, ... in breadth-first discovery order.  ``bad``
    holds the indices of the per-base-state overflow states; ``entry``
    maps each requested start to its fresh-counters product state.
    """

    game: GameStructure
    lmax: int
    bad: frozenset[int]
    entry: dict[str, int]
    base_of: tuple[str, ...]
    window_of: tuple[WindowState | None, ...]


def fresh_window(dims: int, lmax: int) -> WindowState:
    return tuple((0, lmax) for _ in range(dims))


def step_window(ws: WindowState, weight: tuple[int, ...], lmax: int) -> WindowState | None:
    """Advance all window counters along one edge; None means some
    dimension overflowed (one step left and still strictly negative)."""
    out = []
    for (sig, tau), w in zip(ws, weight):
        v = sig + w
        if v >= 0:
            out.append((0, lmax))
        elif tau > 1:
            out.append((v, tau - 1))
        else:
            return None
    return tuple(out)


def build_window_product(
    g: GameStructure,
    lmax: int,
    start: Iterable[str] | None = None,
    product_cap: int = DEFAULT_PRODUCT_CAP,
) -> WindowProduct:
    """Forward-reachable product from fresh counters at ``start``
    (default: every state).  Raises :class:`ResourceLimitError` when the
    state count would exceed ``product_cap``; never truncates."""
    if lmax < 1:
        raise ValueError("lmax must be >= 1")
    start_idx = sorted(g.id_set(start)) if start is not None else list(range(g.n))
    if not start_idx:
        raise ValueError("empty start set")
    fresh = fresh_window(g.dims, lmax)

    keys: dict[tuple, int] = {}
    records: list[tuple] = []  # ('w', base, ws) or ('z', base)

    def intern(key: tuple) -> int:
        got = keys.get(key)
        if got is None:
            got = len(records)
            if got >= product_cap:
                raise ResourceLimitError(
                    f"window product exceeds cap of {product_cap} states"
                )
            keys[key] = got
            records.append(key)
        return got

    entry = {g.names[s]: intern(("w", s, fresh)) for s in start_idx}
    edges: list[tuple[int, int]] = []
    cursor = 0
    while cursor < len(records):
        key = records[cursor]
        src = cursor
        cursor += 1
        if key[0] == "z":
            edges.append((src, intern(("w", key[1], fresh))))
            continue
        _, base, ws = key
        for t, w in g.succ[base]:
            nxt = step_window(ws, w, lmax)
            if nxt is None:
                edges.append((src, intern(("z", t))))
            else:
                edges.append((src, intern(("w", t, nxt))))

    names = [f"q{i}" for i in range(len(records))]
    states = []
    base_of = []
    window_of: list[WindowState | None] = []
    bad = []
    for i, key in enumerate(records):
        if key[0] == "z":
            states.append((names[i], P1))
            base_of.append(g.names[key[1]])
            window_of.append(None)
            bad.append(i)
        else:
            states.append((names[i], g.owner[key[1]]))
            base_of.append(g.names[key[1]])
            window_of.append(key[2])
    product_edges = tuple((names[a], names[b], (0,)) for a, b in edges)
    product = GameStructure(tuple(states), product_edges, 1, names[entry[g.names[start_idx[0]]]])
    return WindowProduct(
        game=product,
        lmax=lmax,
        bad=frozenset(bad),
        entry=entry,
        base_of=tuple(base_of),
        window_of=tuple(window_of),
    )


def fwmp_k(
    g: GameStructure, lmax: int, product_cap: int = DEFAULT_PRODUCT_CAP
) -> SolveReport:
    """Fixed window winners in any dimension count, by solving the
    co-Buchi game over the product's bad states."""
    product = build_window_product(g, lmax, None, product_cap)
    win = arena.solve_cobuchi(product.game, product.bad)
    winners = [s for s, q in product.entry.items() if q in win]
    return SolveReport.from_sets(g, winners)


def direct_fwmp_k(
    g: GameStructure, lmax: int, product_cap: int = DEFAULT_PRODUCT_CAP
) -> SolveReport:
    """Direct fixed window winners: safety over the product instead of
    co-Buchi (no overflow may ever happen)."""
    product = build_window_product(g, lmax, None, product_cap)
    win = arena.solve_safety(product.game, product.game.all_indices - product.bad)
    winners = [s for s, q in product.entry.items() if q in win]
    return SolveReport.from_sets(g, winners)


def serialize_product(product: WindowProduct) -> tuple[str, str]:
    """wgame text of the product (weights dropped) plus the bad-state
    sidecar, one ``bad <product-state-id>`` line per overflow state.
    Back-map annotations ride along as comments."""
    lines = ["wgame 1", "dims 1"]
    game = product.game
    for i, (s, o) in enumerate(game.states):
        lines.append(f"state {s} {'P1' if o == P1 else 'P2'}")
    for a, b, w in game.edges:
        lines.append(f"edge {a} {b} 0")
    lines.append(f"init {game.init}")
    lines.append("# back-map: product state = base state + per-dimension (sum, steps)")
    for i, s in enumerate(game.names):
        ws = product.window_of[i]
        if ws is None:
            lines.append(f"# {s} = overflow({product.base_of[i]})")
        else:
            pretty = " ".join(f"({a},{b})" for a, b in ws)
            lines.append(f"# {s} = {product.base_of[i]} {pretty}")
    sidecar = "".join(f"bad {game.names[i]}\n" for i in sorted(product.bad))
    return "\n".join(lines) + "\n", sidecar
