"""Canonical in-repo game fixtures used across the tests and docs.

FIX1  single zero self-loop.
FIX2  single -1 self-loop.
FIX3  all-P2 hub with two cycles: +1/-1 and -1/-1/+2 (alternation spoils
      small windows even though every simple cycle has mean 0).
FIX4  one-player hub with three cycles of sums +4/-3/-1 whose windows
      only close under the round-robin alternation of all three.
FIX5  paired two-dimension choice gadgets (P2 opens a window on one of
      two dimensions, P1 holds the mirrored choice).
FIX6  a one-way drop onto a zero loop: the first edge opens a window
      that never closes, but the loop itself is safe.
"""

from __future__ import annotations

from .model import GameStructure, parse_game

FIX1_TEXT = """\
wgame 1
dims 1
state a P1
edge a a 0
init a
"""

FIX2_TEXT = """\
wgame 1
dims 1
state a P1
edge a a -1
init a
"""

FIX3_TEXT = """\
wgame 1
dims 1
state c P2
state x P2
state y1 P2
state y2 P2
edge c x 1
edge x c -1
edge c y1 -1
edge y1 y2 -1
edge y2 c 2
init c
"""

FIX4_TEXT = """\
wgame 1
dims 1
state s P1
state a1 P1
state a2 P1
state a3 P1
state a4 P1
state a5 P1
state b1 P1
state b2 P1
state c1 P1
state c2 P1
edge s a1 3
edge a1 a2 3
edge a2 a3 5
edge a3 a4 -1
edge a4 a5 -1
edge a5 s -5
edge s b1 7
edge b1 b2 -1
edge b2 s -9
edge s c1 5
edge c1 c2 5
edge c2 s -11
init s
"""

FIX5_TEXT = """\
wgame 1
dims 2
state s1 P2
state s1L P2
state s1R P2
state t1 P1
state t1L P1
state t1R P1
edge s1 s1L 1 -1
edge s1 s1R -1 1
edge s1L t1 0 0
edge s1R t1 0 0
edge t1 t1L 1 -1
edge t1 t1R -1 1
edge t1L s1 0 0
edge t1R s1 0 0
init s1
"""

FIX6_TEXT = """\
wgame 1
dims 1
state a P1
state b P1
edge a b -1
edge b b 0
init a
"""

ALL_FIXTURE_TEXTS = {
    "FIX1": FIX1_TEXT,
    "FIX2": FIX2_TEXT,
    "FIX3": FIX3_TEXT,
    "FIX4": FIX4_TEXT,
    "FIX5": FIX5_TEXT,
    "FIX6": FIX6_TEXT,
}


def fix1() -> GameStructure:
    return parse_game(FIX1_TEXT)


def fix2() -> GameStructure:
    return parse_game(FIX2_TEXT)


def fix3() -> GameStructure:
    return parse_game(FIX3_TEXT)


def fix4() -> GameStructure:
    return parse_game(FIX4_TEXT)


def fix5() -> GameStructure:
    return parse_game(FIX5_TEXT)


def fix6() -> GameStructure:
    return parse_game(FIX6_TEXT)


def all_fixtures() -> dict[str, GameStructure]:
    return {name: parse_game(text) for name, text in ALL_FIXTURE_TEXTS.items()}
