"""Solvers, strategy synthesis and brute-force oracles for window
mean-payoff games on multi-weighted graphs."""

from .model import (
    GameStructure,
    InvalidGameError,
    InvalidLassoError,
    InvalidStrategyError,
    Lasso,
    ObjectiveKind,
    ObjectiveSpec,
    P1,
    P2,
    ParseError,
    ResourceLimitError,
    SolveReport,
    eval_lasso,
    normalize_threshold,
    parse_game,
    satisfies,
    serialize_game,
    validate,
    window_closure,
)
from .arena import attractor, reachable, solve_cobuchi, solve_safety, subgame
from .classical import mp_threshold_win, mp_value, neg_sup_tp, tp_sup_win
from .window1d import (
    GoodWinTable,
    bounded_wmp,
    direct_bounded_wmp,
    direct_fwmp,
    fwmp,
    good_win,
    shift_for_mp_reduction,
    sufficient_window,
    unb_open_window,
)
from .windowkd import WindowProduct, build_window_product, direct_fwmp_k, fwmp_k
from .strategy import (
    MooreStrategy,
    Verdict,
    min_memory_search,
    parse_strategy,
    serialize_strategy,
    synth_bwmp,
    synth_fwmp_1d,
    synth_fwmp_k,
    verify_strategy,
)
from .testkit import GenSpec, gen_random_game, oracle_classical, oracle_window
from .checks import cross_check

__all__ = [name for name in dir() if not name.startswith("_")]
