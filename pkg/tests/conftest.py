from __future__ import annotations

import pytest
from hypothesis import strategies as st

from wmp.fixtures import fix1, fix2, fix3, fix4, fix5, fix6
from wmp.model import GameStructure, Lasso
from wmp.testkit import GenSpec, gen_random_game


@pytest.fixture
def g1() -> GameStructure:
    return fix1()


@pytest.fixture
def g2() -> GameStructure:
    return fix2()


@pytest.fixture
def g3() -> GameStructure:
    return fix3()


@pytest.fixture
def g4() -> GameStructure:
    return fix4()


@pytest.fixture
def g5() -> GameStructure:
    return fix5()


@pytest.fixture
def g6() -> GameStructure:
    return fix6()


@st.composite
def small_games(draw, max_states: int = 5, max_weight: int = 2, dims: int = 1):
    return gen_random_game(
        GenSpec(
            states=draw(st.integers(1, max_states)),
            dims=dims,
            max_abs_weight=draw(st.integers(0, max_weight)),
            out_degree=(1, 2),
            seed=draw(st.integers(0, 2**48)),
        )
    )


def walk_lasso(g: GameStructure, start: int, picks) -> Lasso:
    """Random walk until a state repeats; `picks` feeds the branching."""
    seen: dict[int, int] = {}
    walk = [start]
    k = 0
    while walk[-1] not in seen:
        seen[walk[-1]] = len(walk) - 1
        succ = g.succ[walk[-1]]
        choice = picks[k % len(picks)] if picks else 0
        k += 1
        walk.append(succ[choice % len(succ)][0])
    cut = seen[walk[-1]]
    names = [g.names[i] for i in walk]
    return Lasso.build(names[:cut], names[cut:-1])


@st.composite
def games_with_lassos(draw, max_states: int = 5, max_weight: int = 2, dims: int = 1):
    g = draw(small_games(max_states, max_weight, dims))
    start = draw(st.integers(0, g.n - 1))
    picks = draw(st.lists(st.integers(0, 7), min_size=1, max_size=16))
    return g, walk_lasso(g, start, picks)
