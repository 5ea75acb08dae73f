"""Rule-variant surface: trigger shapes, board symmetry, single-stone play.

The collapse engine itself is parameterized by Ruleset; this module names
the variant-specific operations and validates their preconditions.
"""

from __future__ import annotations

from typing import List, Set

from .board import Coord, diagonal_neighbors, neighbors
from .errors import UnsupportedVariantError
from .rules import (
    ChoiceProvider,
    GameState,
    Move,
    Observer,
    PlaceSingle,
    Ruleset,
    apply_move,
    legal_moves,
)
from .rules import point_symmetric as _sym


def trigger_neighborhood(ruleset: Ruleset, c: Coord, size: int) -> List[Coord]:
    """Points whose occupation makes a placement at c collapse, ascending."""
    if ruleset.kind == "weak":
        return sorted(neighbors(c, size) + diagonal_neighbors(c, size))
    return list(neighbors(c, size))


def point_symmetric(c: Coord, size: int) -> Coord:
    """Partner of c under 180-degree rotation about the centre point."""
    if size % 2 == 0:
        raise UnsupportedVariantError(
            f"a {size}x{size} board has no centre point")
    return _sym(c, size)


def legal_moves_variant(state: GameState) -> Set[Move]:
    return legal_moves(state)


def apply_single(state: GameState, move: PlaceSingle,
                 provider: ChoiceProvider = None,
                 observer: Observer = None):
    """Place one stone; adjacent pairs still collapse (mover's first), but
    there is no placed pair so the forcing step never runs."""
    if not isinstance(move, PlaceSingle):
        raise TypeError("apply_single takes a PlaceSingle move")
    return apply_move(state, move, provider, observer)
