"""Command-line surface: solve, synth, verify, reduce, gen, oracle,
check and eval-lasso.

Thresholds are accepted here only and rewritten into the weights before
any solver runs; the solvers themselves always work at threshold zero.

Exit codes: 0 success; 1 objective not won from the initial state
(``solve --require-init``) or a failing verification/check; 2 parse
error; 3 invalid game or strategy; 4 unsupported combination;
5 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from .model import (
    GameStructure,
    InvalidGameError,
    InvalidLassoError,
    InvalidStrategyError,
    Lasso,
    ObjectiveKind,
    ObjectiveSpec,
    ParseError,
    ResourceLimitError,
    eval_lasso,
    normalize_threshold,
    parse_game,
    serialize_game,
)
from . import classical, window1d, windowkd
from .strategy import (
    EmptyWinningSetError,
    parse_strategy,
    serialize_strategy,
    synth_bwmp,
    synth_fwmp_1d,
    synth_fwmp_k,
    verify_strategy,
)
from .testkit import GENERATOR_VERSION, GenSpec, gen_random_game, oracle_classical, oracle_window
from .checks import SUITES, cross_check

EXIT_OK = 0
EXIT_NOT_WON = 1
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_UNSUPPORTED = 4
EXIT_RESOURCE = 5

SOLVE_OBJECTIVES = ("gw", "dfwmp", "fwmp", "dbwmp", "bwmp", "mp", "tpsup")
LASSO_KINDS = {k.value: k for k in ObjectiveKind}


def _winning_line(shown) -> str:
    return "winning:" + ("" if not shown else " " + " ".join(shown))


class CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_game(path: str) -> GameStructure:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_game(fh.read())
    except OSError as exc:
        raise CliFailure(EXIT_PARSE, f"cannot read {path}: {exc}")
    except ParseError as exc:
        raise CliFailure(EXIT_PARSE, f"{path}: {exc}")
    except InvalidGameError as exc:
        raise CliFailure(EXIT_INVALID, f"{path}: {exc}")


def _parse_threshold(text: str, dims: int) -> tuple[Fraction, ...]:
    parts = text.split(",")
    if len(parts) == 1 and dims > 1:
        parts = parts * dims
    if len(parts) != dims:
        raise CliFailure(
            EXIT_UNSUPPORTED, f"threshold has {len(parts)} entries, game has {dims}"
        )
    try:
        return tuple(Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliFailure(EXIT_PARSE, f"bad threshold {text!r}: {exc}")


def _product_cap(args) -> int:
    if args.product_cap is not None:
        return args.product_cap
    env = os.environ.get("WMP_PRODUCT_CAP")
    return int(env) if env else windowkd.DEFAULT_PRODUCT_CAP


def _normalized(g: GameStructure, args, objective: str) -> GameStructure:
    if not getattr(args, "threshold", None):
        return g
    thr = _parse_threshold(args.threshold, g.dims)
    if all(t == 0 for t in thr):
        return g
    mode = "total" if objective == "tpsup" else "mean"
    return normalize_threshold(g, thr, mode)


def _solve_sets(g: GameStructure, args) -> tuple[frozenset[str], int | None]:
    objective = args.objective
    lmax = args.lmax
    needs_lmax = objective in ("gw", "dfwmp", "fwmp")
    if needs_lmax and not lmax:
        raise CliFailure(EXIT_UNSUPPORTED, f"--lmax is required for {objective}")
    if not needs_lmax and lmax:
        raise CliFailure(EXIT_UNSUPPORTED, f"--lmax is not accepted for {objective}")
    if objective == "bwmp" and g.dims > 1:
        raise CliFailure(
            EXIT_UNSUPPORTED,
            "bounded window solving is only supported in one dimension: with "
            "multiple weight dimensions the problem is non-primitive-recursive "
            "hard and no algorithm for it is implemented here",
        )
    if objective in ("gw", "dbwmp", "mp", "tpsup") and g.dims > 1:
        raise CliFailure(
            EXIT_UNSUPPORTED, f"{objective} solving needs a one-dimension game"
        )
    if objective == "gw":
        table = window1d.good_win(g, lmax)
        return frozenset(g.names[s] for s in table.winning), None
    if objective == "dfwmp":
        if g.dims == 1:
            return window1d.direct_fwmp(g, lmax), None
        report = windowkd.direct_fwmp_k(g, lmax, _product_cap(args))
        return frozenset(report.winning_p1), None
    if objective == "fwmp":
        if g.dims == 1:
            return window1d.fwmp(g, lmax), None
        report = windowkd.fwmp_k(g, lmax, _product_cap(args))
        return frozenset(report.winning_p1), None
    if objective == "dbwmp":
        return window1d.direct_bounded_wmp(g, args.oracle_budget), None
    if objective == "bwmp":
        report = window1d.bounded_wmp(g, args.oracle_budget)
        return frozenset(report.winning_p1), report.witness_lmax
    if objective == "mp":
        return classical.mp_threshold_win(g), None
    if objective == "tpsup":
        return classical.tp_sup_win(g, args.oracle_budget), None
    raise AssertionError(objective)


def cmd_solve(args) -> int:
    g0 = _read_game(args.game)
    g = _normalized(g0, args, args.objective)
    winning, witness = _solve_sets(g, args)
    shown = [s for s, _ in g0.states if s in winning] if g is not g0 else \
            [s for s, _ in g.states if s in winning]
    print(_winning_line(shown))
    if witness is not None:
        print(f"witness_lmax: {witness}")
    if args.require_init and g.init not in winning:
        return EXIT_NOT_WON
    return EXIT_OK


def cmd_synth(args) -> int:
    g = _read_game(args.game)
    if args.threshold:
        g = _normalized(g, args, args.objective)
    try:
        if args.objective == "bwmp":
            if g.dims > 1:
                raise CliFailure(EXIT_UNSUPPORTED, "bwmp synthesis is one-dimension only")
            strat = synth_bwmp(g, args.oracle_budget)
            winning = frozenset(window1d.bounded_wmp(g, args.oracle_budget).winning_p1)
        elif args.objective in ("fwmp", "dfwmp"):
            if not args.lmax:
                raise CliFailure(EXIT_UNSUPPORTED, "--lmax is required")
            if g.dims == 1 and args.objective == "fwmp":
                strat = synth_fwmp_1d(g, args.lmax)
                winning = window1d.fwmp(g, args.lmax)
            else:
                direct = args.objective == "dfwmp"
                strat = synth_fwmp_k(g, args.lmax, direct, _product_cap(args))
                report = (
                    windowkd.direct_fwmp_k(g, args.lmax, _product_cap(args))
                    if direct
                    else windowkd.fwmp_k(g, args.lmax, _product_cap(args))
                )
                winning = frozenset(report.winning_p1)
        else:
            raise CliFailure(
                EXIT_UNSUPPORTED, f"synthesis supports fwmp, dfwmp and bwmp, not {args.objective}"
            )
    except EmptyWinningSetError:
        print("winning:")
        return EXIT_NOT_WON
    text = serialize_strategy(strat)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(_winning_line([s for s, _ in g.states if s in winning]))
    print(f"memory_states: {strat.size}")
    print(f"strategy: {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _read_game(args.game)
    try:
        with open(args.strategy, "r", encoding="utf-8") as fh:
            strat = parse_strategy(fh.read())
    except OSError as exc:
        raise CliFailure(EXIT_PARSE, f"cannot read {args.strategy}: {exc}")
    except ParseError as exc:
        raise CliFailure(EXIT_PARSE, f"{args.strategy}: {exc}")
    except InvalidStrategyError as exc:
        raise CliFailure(EXIT_INVALID, f"{args.strategy}: {exc}")
    kind = LASSO_KINDS.get(args.objective)
    if kind not in (ObjectiveKind.GW, ObjectiveKind.DIR_FIX, ObjectiveKind.FIX):
        raise CliFailure(
            EXIT_UNSUPPORTED, "verify supports gw, dfwmp and fwmp objectives"
        )
    if not args.lmax:
        raise CliFailure(EXIT_UNSUPPORTED, "--lmax is required")
    starts = args.starts.split(",") if args.starts else None
    try:
        verdict = verify_strategy(
            g, strat, ObjectiveSpec(kind, lmax=args.lmax), starts=starts,
            product_cap=_product_cap(args),
        )
    except InvalidStrategyError as exc:
        raise CliFailure(EXIT_INVALID, str(exc))
    if verdict.passed:
        print("PASS")
        return EXIT_OK
    print("FAIL")
    cex = verdict.counterexample
    print(f"counterexample: stem={','.join(cex.stem)} cycle={','.join(cex.cycle)}")
    return EXIT_NOT_WON


def cmd_reduce(args) -> int:
    g = _read_game(args.game)
    product = windowkd.build_window_product(g, args.lmax, None, _product_cap(args))
    text, sidecar = windowkd.serialize_product(product)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    bad_path = args.bad_out or args.out + ".bad"
    with open(bad_path, "w", encoding="utf-8") as fh:
        fh.write(sidecar)
    print(f"product_states: {product.game.n}")
    print(f"bad_states: {len(product.bad)}")
    print(f"product: {args.out}")
    print(f"sidecar: {bad_path}")
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = GenSpec(
        states=args.states,
        dims=args.dims,
        max_abs_weight=args.max_weight,
        out_degree=tuple(int(x) for x in args.out_degree.split(":")),
        p2_fraction=Fraction(args.p2),
        seed=args.seed,
    )
    g = gen_random_game(spec)
    header = (
        f"# generator: {GENERATOR_VERSION}\n"
        f"# spec: states={spec.states} dims={spec.dims} W={spec.max_abs_weight} "
        f"out={spec.out_degree[0]}:{spec.out_degree[1]} p2={spec.p2_fraction} seed={spec.seed}\n"
    )
    text = header + serialize_game(g)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"game: {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = _read_game(args.game)
    kind = LASSO_KINDS.get(args.objective)
    if kind is None:
        raise CliFailure(EXIT_UNSUPPORTED, f"unknown objective {args.objective}")
    if kind in (ObjectiveKind.GW, ObjectiveKind.DIR_FIX, ObjectiveKind.FIX):
        if not args.lmax:
            raise CliFailure(EXIT_UNSUPPORTED, "--lmax is required")
        spec = ObjectiveSpec(kind, lmax=args.lmax)
        winning = oracle_window(g, spec)
    elif kind in (ObjectiveKind.DIR_BND, ObjectiveKind.BND):
        winning = oracle_window(g, ObjectiveSpec(kind))
    else:
        thr = Fraction(args.threshold) if args.threshold else Fraction(0)
        winning = oracle_classical(g, kind, thr, args.oracle_budget)
    print(_winning_line([s for s, _ in g.states if s in winning]))
    return EXIT_OK


def cmd_check(args) -> int:
    report = cross_check(None, args.suite or None)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.ok else EXIT_NOT_WON


def cmd_eval_lasso(args) -> int:
    g = _read_game(args.game)
    kind = LASSO_KINDS.get(args.objective)
    if kind is None:
        raise CliFailure(EXIT_UNSUPPORTED, f"unknown objective {args.objective}")
    lmax = args.lmax if args.lmax else None
    try:
        spec = ObjectiveSpec(kind, lmax=lmax)
    except ValueError as exc:
        raise CliFailure(EXIT_UNSUPPORTED, str(exc))
    stem = args.stem.split(",") if args.stem else []
    cycle = args.cycle.split(",")
    try:
        result = eval_lasso(g, Lasso.build(stem, cycle), spec)
    except InvalidLassoError as exc:
        raise CliFailure(EXIT_INVALID, str(exc))
    if isinstance(result, bool):
        print(f"verdict: {'true' if result else 'false'}")
    else:
        print("value: " + " ".join(str(v) for v in result))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="wmp", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, game=True):
        if game:
            p.add_argument("game", help="wgame file")
        p.add_argument("--oracle-budget", type=int, default=classical.DEFAULT_ORACLE_BUDGET,
                       help="state cap for the total-payoff backend (default 14)")
        p.add_argument("--product-cap", type=int, default=None,
                       help="window product size cap (or env WMP_PRODUCT_CAP)")
        p.add_argument("--jobs", type=int, default=1,
                       help="accepted for compatibility; solvers are pure and run sequentially")

    p = sub.add_parser("solve", help="compute winning states")
    p.add_argument("--objective", required=True, choices=SOLVE_OBJECTIVES)
    p.add_argument("--lmax", type=int, default=None)
    p.add_argument("--threshold", default=None, help="rational a/b, comma-separated per dimension")
    p.add_argument("--require-init", action="store_true",
                   help="exit 1 unless the initial state wins")
    common(p)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("synth", help="synthesize a winning Moore machine")
    p.add_argument("--objective", required=True, choices=("fwmp", "dfwmp", "bwmp"))
    p.add_argument("--lmax", type=int, default=None)
    p.add_argument("--threshold", default=None)
    p.add_argument("-o", "--out", required=True, help="wstrat output file")
    common(p)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("verify", help="model-check a Moore machine")
    p.add_argument("game")
    p.add_argument("strategy", help="wstrat file")
    p.add_argument("--objective", required=True, choices=("gw", "dfwmp", "fwmp"))
    p.add_argument("--lmax", type=int, default=None)
    p.add_argument("--starts", default=None, help="comma-separated start states (default: init)")
    common(p, game=False)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("reduce", help="emit the window-counter product as a wgame file")
    p.add_argument("--lmax", type=int, required=True)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--bad-out", default=None, help="sidecar path (default: OUT.bad)")
    common(p)
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("gen", help="generate a seeded random game")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--dims", type=int, default=1)
    p.add_argument("--max-weight", type=int, default=1)
    p.add_argument("--out-degree", default="1:2", help="MIN:MAX outgoing edges")
    p.add_argument("--p2", default="1/2", help="fraction of opponent states")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("oracle", help="brute-force winners, independent of the solvers")
    p.add_argument("--objective", required=True, choices=sorted(LASSO_KINDS))
    p.add_argument("--lmax", type=int, default=None)
    p.add_argument("--threshold", default=None)
    common(p)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("check", help="replay the acceptance cross-check suites")
    p.add_argument("--suite", action="append", choices=sorted(SUITES),
                   help="run only the named suites (repeatable)")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("eval-lasso", help="evaluate an objective on stem.cycle^w")
    p.add_argument("--objective", required=True, choices=sorted(LASSO_KINDS))
    p.add_argument("--lmax", type=int, default=None)
    p.add_argument("--stem", default="", help="comma-separated states, may be empty")
    p.add_argument("--cycle", required=True, help="comma-separated states")
    common(p)
    p.set_defaults(fn=cmd_eval_lasso)

    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InvalidGameError, InvalidStrategyError, InvalidLassoError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
