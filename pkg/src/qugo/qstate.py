"""Quantum-state bookkeeping for a board position.

A position factors into a tensor product: one block of empty
intersections, a ket per lone stone, and a two-term superposition per
entangled pair.  Coefficients are symbolic; nothing in the rules ever
assigns them dynamics, so the half/half ignorance default is all a
marginal can report.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .board import BoardState, Color, Coord
from .errors import InvalidCoordinateError, QuantumGoError


class NotEntangledError(QuantumGoError):
    pass


@dataclass(frozen=True)
class EmptyBlock:
    coords: Tuple[Coord, ...]

    def render(self) -> str:
        subs = ",".join(str(c) for c in self.coords)
        return f"(|0>_{{{subs}}})"


@dataclass(frozen=True)
class SingletonKet:
    coord: Coord
    color: Color

    def render(self) -> str:
        return f"(|1>_{{{self.coord}}})_{self.color.value}"


@dataclass(frozen=True)
class PairTerm:
    pair_index: int  # 1-based ordinal among live pairs, placement order
    x: Coord  # lexicographically smaller half
    y: Coord
    color: Color

    def render(self) -> str:
        k = self.pair_index
        first = f"a{k}|0>_{{{self.x}}}|1>_{{{self.y}}}"
        second = f"b{k}|1>_{{{self.x}}}|0>_{{{self.y}}}"
        return f"({first} - {second})_{self.color.value}"


Factor = Union[EmptyBlock, SingletonKet, PairTerm]


@dataclass(frozen=True)
class QStateExpression:
    factors: Tuple[Factor, ...]

    def render(self) -> str:
        return " ".join(f.render() for f in self.factors)


def state_expression(board: BoardState) -> QStateExpression:
    """Factor the whole board; every coordinate lands in exactly one factor."""
    factors: List[Factor] = []
    empties = tuple(board.empties())
    if empties:
        factors.append(EmptyBlock(empties))
    for coord, occ in board.stones():
        if not occ.entangled:
            factors.append(SingletonKet(coord, occ.color))
    live = sorted(board.pairs.values(), key=lambda p: p.move_number)
    for ordinal, pair in enumerate(live, start=1):
        x, y = sorted((pair.a, pair.b))
        factors.append(PairTerm(ordinal, x, y, pair.color))
    return QStateExpression(tuple(factors))


@dataclass(frozen=True)
class Marginal:
    """What a single intersection looks like in isolation."""

    coord: Coord
    p_empty: Fraction
    p_stone: Fraction
    color: Optional[Color]

    @property
    def definite(self) -> bool:
        return self.p_empty == 1 or self.p_stone == 1

    def render(self) -> str:
        c = self.coord
        if self.p_empty == 1:
            return f"|0>_{{{c}}}"
        if self.p_stone == 1:
            assert self.color is not None
            return f"(|1>_{{{c}}})_{self.color.value}"
        assert self.color is not None
        return (f"{self.p_empty}|0>_{{{c}}}<0|_{{{c}}}"
                f" + {self.p_stone}(|1>_{{{c}}}<1|_{{{c}}})_{self.color.value}")


def marginal(board: BoardState, c: Coord) -> Marginal:
    if not board.in_bounds(c):
        raise InvalidCoordinateError(f"{c} is outside a {board.size}x{board.size} board")
    occ = board.get(c)
    if occ is None:
        return Marginal(c, Fraction(1), Fraction(0), None)
    if not occ.entangled:
        return Marginal(c, Fraction(0), Fraction(1), occ.color)
    return Marginal(c, Fraction(1, 2), Fraction(1, 2), occ.color)


def measurement_description(board: BoardState, c: Coord) -> str:
    """The two projection operators a collapse applies at an entangled half."""
    occ = board.get(c)
    if occ is None or not occ.entangled:
        raise NotEntangledError(f"{c} is not an entangled half")
    color = occ.color.value
    return (f"{{|0>_{{{c}}}<0|_{{{c}}}, "
            f"(|1>_{{{c}}}<1|_{{{c}}})_{color}}}")
