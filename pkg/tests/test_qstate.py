"""State-vector rendering and per-point marginals."""

from fractions import Fraction

import pytest

from qugo.board import BoardState, Color, Coord
from qugo.errors import InvalidCoordinateError
from qugo.qstate import (
    EmptyBlock,
    NotEntangledError,
    PairTerm,
    SingletonKet,
    marginal,
    measurement_description,
    state_expression,
)
from qugo.record import parse_record, replay
from qugo.rules import FixedChoices, GameState, PlacePair, apply_move

B, W = Color.BLACK, Color.WHITE

SMALL_GAME = ("size=3\n"
              "komi=0\n"
              "variant=standard\n"
              "B 1: A2* B1\n"
              "W 2: C2* C3\n")

SMALL_EXPRESSION = ("(|0>_{A1,A3,B2,B3,C1,C3})"
                    " (|1>_{C2})_W"
                    " (a1|0>_{A2}|1>_{B1} - b1|1>_{A2}|0>_{B1})_B")


def C(text):
    return Coord.parse(text)


def small_board():
    return replay(parse_record(SMALL_GAME)).board


# -- whole-board expressions ---------------------------------------------------


def test_three_factor_position_renders_exactly():
    assert state_expression(small_board()).render() == SMALL_EXPRESSION


def test_an_empty_board_is_one_empty_block():
    expr = state_expression(BoardState(3))
    assert expr.render() == "(|0>_{A1,A2,A3,B1,B2,B3,C1,C2,C3})"
    assert len(expr.factors) == 1
    assert isinstance(expr.factors[0], EmptyBlock)


def test_every_point_lands_in_exactly_one_factor():
    expr = state_expression(small_board())
    seen = []
    for f in expr.factors:
        if isinstance(f, EmptyBlock):
            seen.extend(f.coords)
        elif isinstance(f, SingletonKet):
            seen.append(f.coord)
        else:
            seen.extend((f.x, f.y))
    assert sorted(seen) == sorted(Coord(c, r) for c in range(3) for r in range(3))


def test_pair_ordinals_follow_placement_order_of_live_pairs():
    s = GameState.new(9, komi=0)
    s, _, _ = apply_move(s, PlacePair(C("C3"), C("G7")))   # 1 black
    s, _, _ = apply_move(s, PlacePair(C("E1"), C("E9")))   # 2 white
    s, _, _ = apply_move(s, PlacePair(C("A1"), C("J9")))   # 3 black
    expr = state_expression(s.board).render()
    assert "(a1|0>_{C3}|1>_{G7} - b1|1>_{C3}|0>_{G7})_B" in expr
    assert "(a2|0>_{E1}|1>_{E9} - b2|1>_{E1}|0>_{E9})_W" in expr
    assert "(a3|0>_{A1}|1>_{J9} - b3|1>_{A1}|0>_{J9})_B" in expr

    # collapsing the oldest pair renumbers the survivors
    s, _, _ = apply_move(s, PlacePair(C("C2"), C("F5")),
                         FixedChoices({1: C("G7"), 4: C("C2")}))
    expr = state_expression(s.board).render()
    assert "(a1|0>_{E1}|1>_{E9} - b1|1>_{E1}|0>_{E9})_W" in expr
    assert "(a2|0>_{A1}|1>_{J9} - b2|1>_{A1}|0>_{J9})_B" in expr
    assert "(|1>_{G7})_B" in expr and "(|1>_{C2})_W" in expr


def test_pair_term_puts_the_smaller_point_first():
    term = PairTerm(2, C("B1"), C("D4"), W)
    assert term.render() == "(a2|0>_{B1}|1>_{D4} - b2|1>_{B1}|0>_{D4})_W"


# -- marginals -----------------------------------------------------------------


def test_entangled_halves_are_even_odds():
    m = marginal(small_board(), C("A2"))
    assert (m.p_empty, m.p_stone, m.color) == (Fraction(1, 2), Fraction(1, 2), B)
    assert not m.definite
    assert m.render() == "1/2|0>_{A2}<0|_{A2} + 1/2(|1>_{A2}<1|_{A2})_B"


def test_settled_points_are_certain():
    board = small_board()
    empty = marginal(board, C("A1"))
    assert empty.definite and empty.p_empty == 1 and empty.color is None
    assert empty.render() == "|0>_{A1}"
    stone = marginal(board, C("C2"))
    assert stone.definite and stone.p_stone == 1 and stone.color is W
    assert stone.render() == "(|1>_{C2})_W"


def test_marginal_checks_the_board_edge():
    with pytest.raises(InvalidCoordinateError):
        marginal(small_board(), C("E5"))


# -- measurement operators -----------------------------------------------------


def test_collapse_operators_at_an_entangled_half():
    assert measurement_description(small_board(), C("A2")) == \
        "{|0>_{A2}<0|_{A2}, (|1>_{A2}<1|_{A2})_B}"


def test_only_entangled_halves_have_measurements():
    board = small_board()
    with pytest.raises(NotEntangledError):
        measurement_description(board, C("A1"))       # empty
    with pytest.raises(NotEntangledError):
        measurement_description(board, C("C2"))       # lone stone
