"""Area scoring and end-of-game pair resolution."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .board import BoardState, Color, Coord, neighbors
from .errors import NotFinalizedError
from .rules import (
    FINISHED,
    ChoiceProvider,
    ChoiceRequest,
    CollapseEvent,
    GameState,
    _ask,
)


@dataclass(frozen=True)
class ScoreResult:
    black_area: int
    white_area: int
    dame: int
    komi: float
    winner: Optional[Color]  # None for a draw
    margin: float

    def result_string(self) -> str:
        if self.winner is None:
            return "Draw"
        return f"{self.winner.value}+{self.margin:g}"


def resignation_string(winner: Color) -> str:
    return f"{winner.value}+R"


def finalize_pairs(state: GameState, black: ChoiceProvider,
                   white: ChoiceProvider) -> Tuple[GameState, List[CollapseEvent]]:
    """Resolve pairs still entangled when the game ends by two passes.

    Pairs resolve oldest first, each owner choosing freely.  No captures are
    re-examined: stones kept here stay even with no liberties.
    """
    if state.status != FINISHED:
        raise NotFinalizedError("the game is still in progress")
    if not state.board.pairs:
        return state, []
    board = state.board.copy()
    events: List[CollapseEvent] = []
    for pid in sorted(board.pairs, key=lambda p: board.pairs[p].move_number):
        pair = board.pairs[pid]
        provider = black if pair.color is Color.BLACK else white
        kept = _ask(provider, ChoiceRequest(pair.color, pid, (pair.a, pair.b)))
        removed = board.collapse_pair(pid, kept)
        events.append(CollapseEvent(0, pid, kept, removed, pair.color))
    s = GameState(board, state.to_move, state.komi, state.ruleset, state.superko,
                  state.consecutive_passes, state.move_number, state.status,
                  state.winner_by_resignation, state.history_hashes,
                  state.history_forms)
    return s, events


def area_counts(board: BoardState) -> Tuple[int, int, int]:
    """(black area, white area, dame): stones plus empty regions bordered by
    one colour only.  Mixed-border and stoneless regions are dame."""
    if board.pairs:
        raise NotFinalizedError("entangled pairs still on the board")
    size = board.size
    grid = board.grid
    black = white = dame = 0
    for occ in grid.values():
        if occ.color is Color.BLACK:
            black += 1
        else:
            white += 1
    seen = set()
    for start in (c for c in (Coord(col, row) for col in range(size) for row in range(size))
                  if c not in grid):
        if start in seen:
            continue
        region = {start}
        frontier = [start]
        borders = set()
        while frontier:
            cur = frontier.pop()
            for n in neighbors(cur, size):
                occ = grid.get(n)
                if occ is None:
                    if n not in region:
                        region.add(n)
                        frontier.append(n)
                else:
                    borders.add(occ.color)
        seen |= region
        if borders == {Color.BLACK}:
            black += len(region)
        elif borders == {Color.WHITE}:
            white += len(region)
        else:
            dame += len(region)
    return black, white, dame


def score(state: GameState) -> ScoreResult:
    """Chinese-style area score.  Requires a finished, fully collapsed board."""
    if state.status != FINISHED:
        raise NotFinalizedError("the game is still in progress")
    black, white, dame = area_counts(state.board)
    komi = state.komi
    diff = black - (white + komi)
    if diff > 0:
        winner: Optional[Color] = Color.BLACK
    elif diff < 0:
        winner = Color.WHITE
    else:
        winner = None
    return ScoreResult(black, white, dame, komi, winner, abs(diff))
