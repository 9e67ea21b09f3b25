"""Core model for multi-weighted two-player games.

Defines the immutable game structure, the finite representation of
ultimately periodic plays (lassos), objective specifications, threshold
normalization, the `wgame` text format, and exact objective evaluation
on lassos.  Weights are arbitrary-precision integers; thresholds are
exact rationals.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

P1 = 1
P2 = 2

_ID_RE = re.compile(r"[A-Za-z0-9_]+\Z")
_INT_RE = re.compile(r"[+-]?\d+\Z")


class ParseError(ValueError):
    """Malformed wgame/wstrat text.  Carries a 1-based line and column."""

    def __init__(self, msg: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.line = line
        self.col = col


class InvalidGameError(ValueError):
    """Well-formed input that violates a game structure invariant."""


class InvalidLassoError(ValueError):
    """Lasso whose consecutive state pairs are not edges of the game."""


class InvalidStrategyError(ValueError):
    """Moore machine that is partial or prescribes non-edge moves."""


class ResourceLimitError(RuntimeError):
    """A configured cap (product size, enumeration budget, oracle size)
    was exceeded.  Never raised silently; callers decide how to surface it."""


@dataclass(frozen=True)
class GameStructure:
    """A finite arena with k-dimension integer edge weights.

    ``states`` is the canonical ordering: every set of states produced
    by this library is reported sorted by declaration order.  The
    structure itself tolerates invariant violations (dead ends, arity
    mismatches); :func:`validate` reports them as data.
    """

    states: tuple[tuple[str, int], ...]
    edges: tuple[tuple[str, str, tuple[int, ...]], ...]
    dims: int
    init: str

    @staticmethod
    def build(
        states: Iterable[tuple[str, int]],
        edges: Iterable[tuple[str, str, Sequence[int]]],
        dims: int,
        init: str,
    ) -> "GameStructure":
        return GameStructure(
            states=tuple((str(s), int(o)) for s, o in states),
            edges=tuple((str(a), str(b), tuple(int(x) for x in w)) for a, b, w in edges),
            dims=int(dims),
            init=str(init),
        )

    @cached_property
    def n(self) -> int:
        return len(self.states)

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.states)

    @cached_property
    def owner(self) -> tuple[int, ...]:
        return tuple(o for _, o in self.states)

    @cached_property
    def index(self) -> dict[str, int]:
        return {s: i for i, (s, _) in enumerate(self.states)}

    @cached_property
    def succ(self) -> tuple[tuple[tuple[int, tuple[int, ...]], ...], ...]:
        """Outgoing (target-index, weight) pairs per state, in edge order."""
        out: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in self.states]
        idx = self.index
        for a, b, w in self.edges:
            if a in idx and b in idx:
                out[idx[a]].append((idx[b], w))
        return tuple(tuple(x) for x in out)

    @cached_property
    def preds(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in self.states]
        idx = self.index
        for a, b, _ in self.edges:
            if a in idx and b in idx:
                inc[idx[b]].append(idx[a])
        return tuple(tuple(x) for x in inc)

    @cached_property
    def edge_weight(self) -> dict[tuple[int, int], tuple[int, ...]]:
        idx = self.index
        return {
            (idx[a], idx[b]): w
            for a, b, w in self.edges
            if a in idx and b in idx
        }

    @cached_property
    def max_abs_weight(self) -> int:
        """W, the largest absolute weight entry (0 for weightless games)."""
        best = 0
        for _, _, w in self.edges:
            for x in w:
                if abs(x) > best:
                    best = abs(x)
        return best

    @cached_property
    def weight_bits(self) -> int:
        """V, the binary encoding length of W (1 when W = 0)."""
        return max(1, self.max_abs_weight.bit_length())

    @cached_property
    def all_indices(self) -> frozenset[int]:
        return frozenset(range(self.n))

    def owner_of(self, state_id: str) -> int:
        return self.owner[self.index[state_id]]

    def sorted_ids(self, indices: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.names[i] for i in sorted(indices))

    def id_set(self, ids: Iterable[str]) -> frozenset[int]:
        return frozenset(self.index[s] for s in ids)


def validate(g: GameStructure) -> list[str]:
    """Return all invariant violations of ``g`` (empty list iff valid)."""
    out: list[str] = []
    if g.dims < 1:
        out.append(f"dims must be >= 1, got {g.dims}")
    seen: set[str] = set()
    for s, o in g.states:
        if not _ID_RE.match(s):
            out.append(f"bad state id {s!r}")
        if s in seen:
            out.append(f"duplicate state {s}")
        seen.add(s)
        if o not in (P1, P2):
            out.append(f"state {s} has unknown owner {o}")
    pairs: set[tuple[str, str]] = set()
    for a, b, w in g.edges:
        if a not in seen:
            out.append(f"edge source {a} is not a declared state")
        if b not in seen:
            out.append(f"edge target {b} is not a declared state")
        if len(w) != g.dims:
            out.append(f"edge {a}->{b} has {len(w)} weight entries, expected {g.dims}")
        if (a, b) in pairs:
            out.append(f"duplicate edge {a}->{b}")
        pairs.add((a, b))
    if g.init not in seen:
        out.append(f"init state {g.init} is not declared")
    has_out = {a for a, _, _ in g.edges}
    for s, _ in g.states:
        if s not in has_out:
            out.append(f"dead-end state {s} (no outgoing edge)")
    return out


# --- wgame text format -------------------------------------------------

def _tokens(line: str) -> list[tuple[str, int]]:
    """Split a line into (token, 1-based column) pairs, dropping comments."""
    body = line.split("#", 1)[0]
    out = []
    col = 1
    for piece in body.split():
        col = body.index(piece, col - 1) + 1
        out.append((piece, col))
        col += len(piece)
    return out


def parse_game(text: str) -> GameStructure:
    """Parse the wgame format into a validated :class:`GameStructure`.

    Raises :class:`ParseError` on syntax problems (with line/column) and
    :class:`InvalidGameError` when the described game breaks an
    invariant (duplicate state, unknown edge endpoint, weight arity,
    dead end, missing init).
    """
    states: list[tuple[str, int]] = []
    edges: list[tuple[str, str, tuple[int, ...]]] = []
    dims: int | None = None
    init: str | None = None
    # sections must appear in order: header, dims, states, edges, init
    section = 0
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        word, col = toks[0]
        if not saw_header:
            if word != "wgame" or len(toks) != 2 or toks[1][0] != "1":
                raise ParseError("expected header 'wgame 1'", lineno, col)
            saw_header = True
            continue
        if word == "dims":
            if section > 0:
                raise ParseError("dims must come before states", lineno, col)
            if len(toks) != 2 or not toks[1][0].isdigit():
                raise ParseError("expected 'dims <k>'", lineno, col)
            dims = int(toks[1][0])
            section = 1
        elif word == "state":
            if dims is None:
                raise ParseError("dims must come before states", lineno, col)
            if section > 1:
                raise ParseError("state line after edges", lineno, col)
            section = 1
            if len(toks) != 3 or toks[2][0] not in ("P1", "P2"):
                raise ParseError("expected 'state <id> <P1|P2>'", lineno, col)
            sid = toks[1][0]
            if not _ID_RE.match(sid):
                raise ParseError(f"bad state id {sid!r}", lineno, toks[1][1])
            states.append((sid, P1 if toks[2][0] == "P1" else P2))
        elif word == "edge":
            if dims is None:
                raise ParseError("dims must come before edges", lineno, col)
            if section > 2:
                raise ParseError("edge line after init", lineno, col)
            section = 2
            if len(toks) < 3:
                raise ParseError("expected 'edge <src> <dst> <w...>'", lineno, col)
            src, dst = toks[1][0], toks[2][0]
            ws: list[int] = []
            for tok, tcol in toks[3:]:
                if not _INT_RE.match(tok):
                    raise ParseError(f"bad weight {tok!r}", lineno, tcol)
                ws.append(int(tok))
            edges.append((src, dst, tuple(ws)))
        elif word == "init":
            if len(toks) != 2:
                raise ParseError("expected 'init <id>'", lineno, col)
            if init is not None:
                raise InvalidGameError("duplicate init directive")
            init = toks[1][0]
            section = 3
        else:
            raise ParseError(f"unknown directive {word!r}", lineno, col)
    if not saw_header:
        raise ParseError("empty input, expected 'wgame 1'", 1)
    if dims is None:
        raise InvalidGameError("missing dims directive")
    if init is None:
        raise InvalidGameError("missing init directive")
    g = GameStructure.build(states, edges, dims, init)
    problems = validate(g)
    if problems:
        raise InvalidGameError("; ".join(problems))
    return g


def serialize_game(g: GameStructure) -> str:
    """Canonical wgame text: states in declaration order, one edge per line."""
    lines = ["wgame 1", f"dims {g.dims}"]
    for s, o in g.states:
        lines.append(f"state {s} {'P1' if o == P1 else 'P2'}")
    for a, b, w in g.edges:
        lines.append("edge " + a + " " + b + " " + " ".join(str(x) for x in w))
    lines.append(f"init {g.init}")
    return "\n".join(lines) + "\n"


# --- lassos ------------------------------------------------------------

@dataclass(frozen=True)
class Lasso:
    """Finite representation of the play stem . cycle^omega."""

    stem: tuple[str, ...]
    cycle: tuple[str, ...]

    @staticmethod
    def build(stem: Iterable[str], cycle: Iterable[str]) -> "Lasso":
        return Lasso(tuple(stem), tuple(cycle))

    def state_at(self, pos: int) -> str:
        if pos < len(self.stem):
            return self.stem[pos]
        return self.cycle[(pos - len(self.stem)) % len(self.cycle)]


def validate_lasso(g: GameStructure, lasso: Lasso) -> None:
    if not lasso.cycle:
        raise InvalidLassoError("cycle must be nonempty")
    seq = list(lasso.stem) + list(lasso.cycle)
    for s in seq:
        if s not in g.index:
            raise InvalidLassoError(f"unknown state {s}")
    pairs = list(zip(seq, seq[1:])) + [(lasso.cycle[-1], lasso.cycle[0])]
    ew = g.edge_weight
    idx = g.index
    for a, b in pairs:
        if (idx[a], idx[b]) not in ew:
            raise InvalidLassoError(f"{a}->{b} is not an edge")


def _lasso_weights(g: GameStructure, lasso: Lasso) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Edge weight sequences: one per stem step (incl. the junction into
    the cycle) and one per cycle step (incl. the wrap-around)."""
    idx, ew = g.index, g.edge_weight
    seq = list(lasso.stem) + [lasso.cycle[0]]
    stem_w = [ew[(idx[a], idx[b])] for a, b in zip(seq, seq[1:])]
    cyc = list(lasso.cycle) + [lasso.cycle[0]]
    cycle_w = [ew[(idx[a], idx[b])] for a, b in zip(cyc, cyc[1:])]
    return stem_w, cycle_w


# --- objectives --------------------------------------------------------

class ObjectiveKind(Enum):
    GW = "gw"
    DIR_FIX = "dfwmp"
    DIR_BND = "dbwmp"
    FIX = "fwmp"
    BND = "bwmp"
    MEAN_INF = "meaninf"
    MEAN_SUP = "meansup"
    TOTAL_INF = "totalinf"
    TOTAL_SUP = "totalsup"


WINDOW_KINDS = frozenset(
    {ObjectiveKind.GW, ObjectiveKind.DIR_FIX, ObjectiveKind.DIR_BND,
     ObjectiveKind.FIX, ObjectiveKind.BND}
)
FIXED_WINDOW_KINDS = frozenset({ObjectiveKind.GW, ObjectiveKind.DIR_FIX, ObjectiveKind.FIX})
CLASSICAL_KINDS = frozenset(
    {ObjectiveKind.MEAN_INF, ObjectiveKind.MEAN_SUP,
     ObjectiveKind.TOTAL_INF, ObjectiveKind.TOTAL_SUP}
)

Rational = Union[int, str, Fraction]


@dataclass(frozen=True)
class ObjectiveSpec:
    """An objective kind with its window size and threshold vector.

    ``lmax`` is required for the fixed window kinds (gw, dfwmp, fwmp)
    and forbidden otherwise.  ``threshold`` defaults to the zero vector
    of the dimension of whatever game the objective is applied to.
    """

    kind: ObjectiveKind
    lmax: int | None = None
    threshold: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.kind in FIXED_WINDOW_KINDS:
            if self.lmax is None or self.lmax < 1:
                raise ValueError(f"{self.kind.value} requires lmax >= 1")
        elif self.lmax is not None:
            raise ValueError(f"{self.kind.value} does not take lmax")
        if self.threshold is not None:
            object.__setattr__(
                self, "threshold", tuple(Fraction(t) for t in self.threshold)
            )

    def threshold_for(self, g: GameStructure) -> tuple[Fraction, ...]:
        if self.threshold is None:
            return tuple(Fraction(0) for _ in range(g.dims))
        if len(self.threshold) != g.dims:
            raise ValueError(
                f"threshold has {len(self.threshold)} entries, game has {g.dims} dimensions"
            )
        return self.threshold


# --- threshold normalization -------------------------------------------

def _fresh_id(base: str, taken: Iterable[str]) -> str:
    pool = set(taken)
    cand = base
    while cand in pool:
        cand += "_"
    return cand


def normalize_threshold(
    g: GameStructure, v: Sequence[Rational], mode: str
) -> GameStructure:
    """Rewrite ``g`` so that threshold ``v`` becomes the zero vector.

    ``mode='mean'`` rescales each weight entry to ``b*w - a`` for the
    per-dimension threshold ``a/b``; winning sets are preserved exactly,
    state for state, for mean-payoff and all window objectives.

    ``mode='total'`` rescales weights by ``b`` and prepends a fresh
    initial state whose single outgoing edge has weight ``-a``.  The
    total-payoff query from the new initial state at threshold zero
    matches the query from the old initial state at threshold ``v``;
    states other than the init keep their zero-threshold sets.
    """
    if mode not in ("mean", "total"):
        raise ValueError(f"unknown mode {mode!r}")
    if len(v) != g.dims:
        raise ValueError(f"threshold has {len(v)} entries, game has {g.dims}")
    fracs = [Fraction(t) for t in v]
    nums = [f.numerator for f in fracs]
    dens = [f.denominator for f in fracs]
    if any(d < 1 for d in dens):
        raise ValueError("zero denominator in threshold")
    if mode == "mean":
        new_edges = [
            (a, b, tuple(dens[t] * w[t] - nums[t] for t in range(g.dims)))
            for a, b, w in g.edges
        ]
        return GameStructure(g.states, tuple(new_edges), g.dims, g.init)
    new_edges = [
        (a, b, tuple(dens[t] * w[t] for t in range(g.dims))) for a, b, w in g.edges
    ]
    boot = _fresh_id("tinit", g.names)
    new_states = ((boot, P1),) + g.states
    new_edges.insert(0, (boot, g.init, tuple(-a for a in nums)))
    return GameStructure(new_states, tuple(new_edges), g.dims, boot)


# --- exact evaluation on lassos -----------------------------------------

def window_closure(g: GameStructure, lasso: Lasso, pos: int, dim: int) -> int | None:
    """Number of steps after which the window opened at ``pos`` first
    closes in ``dim``, or None if it stays open forever.

    A window is declared open forever once its best partial sum stops
    improving across a full cycle period: the cycle then contributes a
    non-positive amount per period in this dimension.
    """
    stem_w, cycle_w = _lasso_weights(g, lasso)
    m, L = len(stem_w), len(cycle_w)

    def w(p: int) -> int:
        return (stem_w[p] if p < m else cycle_w[(p - m) % L])[dim]

    total = 0
    steps = 0
    p = pos
    in_cycle_steps = 0
    best = None
    best_at_entry_period = None
    while True:
        total += w(p)
        steps += 1
        p += 1
        if total >= 0:
            return steps
        if best is None or total > best:
            best = total
        if p >= m:
            in_cycle_steps += 1
            if in_cycle_steps % L == 0:
                if best_at_entry_period is not None and best <= best_at_entry_period:
                    return None
                best_at_entry_period = best


def _distinct_positions(lasso: Lasso) -> tuple[int, int]:
    """(all positions bound, first cycle position): windows opened at
    positions past ``stem + one cycle round`` replay earlier behavior."""
    return len(lasso.stem) + len(lasso.cycle), len(lasso.stem)


def eval_lasso(g: GameStructure, lasso: Lasso, spec: ObjectiveSpec):
    """Exact objective evaluation on an ultimately periodic play.

    Window kinds return a bool verdict (threshold must already be
    normalized to zero).  Mean and total kinds return a per-dimension
    value tuple: exact rationals for means, rationals or +/-inf for
    total payoffs.
    """
    validate_lasso(g, lasso)
    if spec.kind in WINDOW_KINDS:
        thr = spec.threshold_for(g)
        if any(t != 0 for t in thr):
            raise ValueError("window objectives are evaluated at threshold zero; "
                             "normalize the game first")
        return _eval_window(g, lasso, spec)
    return _eval_classical(g, lasso, spec.kind)


def _eval_window(g: GameStructure, lasso: Lasso, spec: ObjectiveSpec) -> bool:
    hi, cyc0 = _distinct_positions(lasso)
    kind = spec.kind

    def closes_within(positions: range, bound: int | None) -> bool:
        for pos in positions:
            for t in range(g.dims):
                c = window_closure(g, lasso, pos, t)
                if c is None or (bound is not None and c > bound):
                    return False
        return True

    if kind is ObjectiveKind.GW:
        return closes_within(range(0, 1), spec.lmax)
    if kind is ObjectiveKind.DIR_FIX:
        return closes_within(range(0, hi), spec.lmax)
    if kind is ObjectiveKind.FIX:
        return closes_within(range(cyc0, hi), spec.lmax)
    if kind is ObjectiveKind.DIR_BND:
        return closes_within(range(0, hi), None)
    if kind is ObjectiveKind.BND:
        return closes_within(range(cyc0, hi), None)
    raise AssertionError(kind)


def _eval_classical(g: GameStructure, lasso: Lasso, kind: ObjectiveKind) -> tuple:
    stem_w, cycle_w = _lasso_weights(g, lasso)
    L = len(cycle_w)
    out = []
    for t in range(g.dims):
        cyc_sum = sum(w[t] for w in cycle_w)
        if kind in (ObjectiveKind.MEAN_INF, ObjectiveKind.MEAN_SUP):
            out.append(Fraction(cyc_sum, L))
            continue
        if cyc_sum > 0:
            out.append(math.inf)
            continue
        if cyc_sum < 0:
            out.append(-math.inf)
            continue
        # zero cycle: the recurring prefix sums are the junction value
        # plus each partial sum around one period
        base = sum(w[t] for w in stem_w)
        part = 0
        rec = [base]
        for w in cycle_w[:-1]:
            part += w[t]
            rec.append(base + part)
        value = min(rec) if kind is ObjectiveKind.TOTAL_INF else max(rec)
        out.append(Fraction(value))
    return tuple(out)


def satisfies(g: GameStructure, lasso: Lasso, spec: ObjectiveSpec) -> bool:
    """Boolean form of :func:`eval_lasso`: window kinds directly, the
    classical kinds by comparing values against the threshold vector."""
    result = eval_lasso(g, lasso, spec)
    if isinstance(result, bool):
        return result
    thr = spec.threshold_for(g)
    return all(v >= t for v, t in zip(result, thr))


# --- solver output packaging ---------------------------------------------

@dataclass(frozen=True, eq=False)
class SolveReport:
    """The winning partition plus optional witnesses.

    ``winning_p1`` and ``winning_p2`` always partition the state space
    (the objectives here are determined), both sorted canonically.
    """

    winning_p1: tuple[str, ...]
    winning_p2: tuple[str, ...]
    witness_lmax: int | None = None
    strategy: object | None = None
    counterexample: Lasso | None = None

    @staticmethod
    def from_sets(
        g: GameStructure,
        winning_p1: Iterable[str],
        witness_lmax: int | None = None,
        strategy: object | None = None,
        counterexample: Lasso | None = None,
    ) -> "SolveReport":
        win = frozenset(winning_p1)
        unknown = win - set(g.names)
        if unknown:
            raise ValueError(f"winning set mentions unknown states {sorted(unknown)}")
        return SolveReport(
            winning_p1=g.sorted_ids(g.id_set(win)),
            winning_p2=g.sorted_ids(g.all_indices - g.id_set(win)),
            witness_lmax=witness_lmax,
            strategy=strategy,
            counterexample=counterexample,
        )
