"""Move application and the collapse process.

A move normally places an entangled pair of same-coloured stones on two
empty points.  If any stone sits next to either placed point, collapses
fire in three strictly ordered steps:

  1. the mover's other adjacent pairs resolve, one at a time, oldest first;
  2. the opponent's adjacent pairs resolve the same way;
  3. the placed pair itself resolves, and the mover must keep a placed
     stone that touches a stone *kept* in step 1 or 2 when one exists.

Only pairs adjacent to the just-placed points ever collapse: a stone that
appears because of a step-1/2 choice does not recursively trigger more
collapses.  Captures are settled once, after step 3.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import (Callable, Dict, List, NamedTuple, Optional, Protocol,
                    Sequence, Set, Tuple, Union)

from .board import (
    BoardState,
    Color,
    Coord,
    capture_scan,
    diagonal_neighbors,
    neighbors,
)
from .errors import IllegalMoveError, ProtocolViolationError

ONGOING = "ongoing"
FINISHED = "finished"


@dataclass(frozen=True)
class Ruleset:
    """Which move shapes are legal and how wide the collapse trigger reaches.

    `wide_step3` widens the step-3 keep rule to diagonals as well; by default
    only the trigger is widened under the weak ruleset.
    """

    kind: str = "standard"  # standard | weak | symmetric | semiquantum
    entangled_player: Optional[Color] = None
    wide_step3: bool = False

    def __post_init__(self):
        if self.kind not in ("standard", "weak", "symmetric", "semiquantum"):
            raise ValueError(f"unknown ruleset kind {self.kind!r}")
        if self.kind == "semiquantum" and self.entangled_player is None:
            raise ValueError("semiquantum needs an entangled player")
        if self.kind != "semiquantum" and self.entangled_player is not None:
            raise ValueError("entangled_player only applies to semiquantum")

    @classmethod
    def standard(cls) -> "Ruleset":
        return cls("standard")

    @classmethod
    def weak(cls, wide_step3: bool = False) -> "Ruleset":
        return cls("weak", wide_step3=wide_step3)

    @classmethod
    def symmetric(cls) -> "Ruleset":
        return cls("symmetric")

    @classmethod
    def semiquantum(cls, entangled_player: Color) -> "Ruleset":
        return cls("semiquantum", entangled_player=entangled_player)

    @property
    def tag(self) -> str:
        if self.kind == "semiquantum":
            side = "black" if self.entangled_player is Color.BLACK else "white"
            return f"semiquantum-{side}"
        return self.kind

    @classmethod
    def from_tag(cls, tag: str) -> "Ruleset":
        if tag == "semiquantum-black":
            return cls.semiquantum(Color.BLACK)
        if tag == "semiquantum-white":
            return cls.semiquantum(Color.WHITE)
        return cls(tag)


def point_symmetric(c: Coord, size: int) -> Coord:
    """The point-symmetric partner about the board centre."""
    return Coord(size - 1 - c[0], size - 1 - c[1])


# -- moves -------------------------------------------------------------------


@dataclass(frozen=True)
class PlacePair:
    a: Coord
    b: Coord

    def canonical(self) -> "PlacePair":
        return self if self.a <= self.b else PlacePair(self.b, self.a)


@dataclass(frozen=True)
class PlaceSingle:
    point: Coord


@dataclass(frozen=True)
class Pass:
    pass


@dataclass(frozen=True)
class Resign:
    pass


Move = Union[PlacePair, PlaceSingle, Pass, Resign]


# -- collapse plumbing -------------------------------------------------------


class ChoiceRequest(NamedTuple):
    """One kept-or-removed decision.  `forced`, when set, lists the only
    answers the rules allow."""

    chooser: Color
    pair_id: int
    options: Tuple[Coord, Coord]
    forced: Optional[Tuple[Coord, ...]] = None
    step: int = 0  # 0 scoring finalization, else the collapse step asking

    @property
    def allowed(self) -> Tuple[Coord, ...]:
        return self.forced if self.forced else self.options


class CollapseEvent(NamedTuple):
    step: int  # 1 mover's pairs, 2 opponent's pairs, 3 the placed pair
    pair_id: int
    kept: Coord
    removed: Coord
    chooser: Color


class ChoiceProvider(Protocol):
    def answer(self, request: ChoiceRequest) -> Coord: ...


class FirstChoices:
    """Always keeps the first allowed option; handy for deterministic play."""

    def answer(self, request: ChoiceRequest) -> Coord:
        return request.allowed[0]


class RandomChoices:
    def __init__(self, rng: random.Random):
        self.random = rng.random  # draws stay on the one stream

    def answer(self, request: ChoiceRequest) -> Coord:
        allowed = request.allowed
        return allowed[int(self.random() * len(allowed))]


class FixedChoices:
    """Answers from a pair_id -> kept coordinate map."""

    def __init__(self, kept_by_pair: Dict[int, Coord]):
        self.kept_by_pair = kept_by_pair

    def answer(self, request: ChoiceRequest) -> Coord:
        try:
            return self.kept_by_pair[request.pair_id]
        except KeyError:
            raise ProtocolViolationError(f"no choice on file for pair {request.pair_id}")


Observer = Callable[[CollapseEvent, BoardState], None]


def _reach(board: BoardState, c: Coord, ruleset: Ruleset) -> Tuple[Coord, ...]:
    if ruleset.kind == "weak":
        return neighbors(c, board.size) + diagonal_neighbors(c, board.size)
    return neighbors(c, board.size)


def collapse_trigger(board: BoardState, placed: Sequence[Coord],
                     ruleset: Ruleset = Ruleset.standard()) -> bool:
    """True iff any stone, the placed pair's own partner included, occupies
    a point in reach of a just-placed coordinate."""
    grid = board.grid
    for p in placed:
        for n in _reach(board, p, ruleset):
            if n in grid:
                return True
    return False


def affected_pairs(board: BoardState, placed: Sequence[Coord], owner: Color,
                   exclude_pair: Optional[int] = None,
                   ruleset: Ruleset = Ruleset.standard()) -> List[int]:
    """Ids of `owner`'s active pairs with a stone in reach of a placed
    coordinate, oldest first.  Each pair appears once."""
    grid = board.grid
    found: Set[int] = set()
    for p in placed:
        for n in _reach(board, p, ruleset):
            occ = grid.get(n)
            if occ is not None and occ.pair_id is not None and occ.color is owner:
                if occ.pair_id != exclude_pair:
                    found.add(occ.pair_id)
    return sorted(found, key=lambda pid: board.pairs[pid].move_number)


def _ask(provider: Optional[ChoiceProvider], request: ChoiceRequest) -> Coord:
    if provider is None:
        raise ProtocolViolationError("a collapse choice is needed but no provider was given")
    answer = provider.answer(request)
    if answer not in request.allowed:
        raise ProtocolViolationError(
            f"pair {request.pair_id}: {answer} not among allowed {request.allowed}")
    return answer


# -- game state --------------------------------------------------------------


class GameState:
    """Immutable-style game snapshot; apply_move returns a fresh state."""

    __slots__ = ("board", "to_move", "komi", "ruleset", "superko",
                 "consecutive_passes", "move_number", "status",
                 "winner_by_resignation", "history_hashes", "history_forms")

    def __init__(self, board: BoardState, to_move: Color, komi: float,
                 ruleset: Ruleset, superko: str, consecutive_passes: int,
                 move_number: int, status: str,
                 winner_by_resignation: Optional[Color],
                 history_hashes: Tuple[int, ...], history_forms: Tuple):
        self.board = board
        self.to_move = to_move
        self.komi = komi
        self.ruleset = ruleset
        self.superko = superko
        self.consecutive_passes = consecutive_passes
        self.move_number = move_number
        self.status = status
        self.winner_by_resignation = winner_by_resignation
        self.history_hashes = history_hashes
        self.history_forms = history_forms

    @classmethod
    def new(cls, size: int = 19, komi: float = 7.5,
            ruleset: Ruleset = Ruleset.standard(), first: Color = Color.BLACK,
            handicap: Sequence[Coord] = (), superko: str = "position") -> "GameState":
        if superko not in ("position", "situation"):
            raise ValueError(f"unknown superko mode {superko!r}")
        if ruleset.kind == "symmetric" and size % 2 == 0:
            raise ValueError("the symmetric ruleset needs an odd board size")
        board = BoardState(size)
        for c in handicap:
            board.place_singleton(c, Color.BLACK)
        if handicap:
            first = Color.WHITE
        h, form = _position_identity(board, first, superko)
        return cls(board, first, komi, ruleset, superko, 0, 0, ONGOING, None,
                   (h,), (form,))

    def result_known(self) -> bool:
        return self.status == FINISHED


def _position_identity(board: BoardState, next_to_move: Color, superko: str):
    h = board.zhash
    tm_code = 0
    if superko == "situation":
        tm_code = 1 if next_to_move is Color.BLACK else 2
        if next_to_move is Color.WHITE:
            h ^= board._z.to_move
    return h, board.canonical_form() + (tm_code,)


def position_hash(board: BoardState) -> int:
    """Hash of occupancy colours plus the unordered pairing partition.
    Whose turn it is does not participate."""
    return board.zhash


def _check_shape(state: GameState, move: Move, mover: Color) -> None:
    rs = state.ruleset
    if isinstance(move, PlacePair):
        if rs.kind == "semiquantum" and mover is not rs.entangled_player:
            raise IllegalMoveError("wrong_move_type", "this colour places single stones")
        if rs.kind == "symmetric":
            if move.b != point_symmetric(move.a, state.board.size):
                raise IllegalMoveError(
                    "asymmetric_pair",
                    f"{move.a}/{move.b} are not point-symmetric partners")
    elif isinstance(move, PlaceSingle):
        if rs.kind in ("standard", "weak"):
            raise IllegalMoveError("wrong_move_type", "this ruleset places pairs only")
        if rs.kind == "semiquantum" and mover is rs.entangled_player:
            raise IllegalMoveError("wrong_move_type", "this colour places pairs")
        if rs.kind == "symmetric":
            sym = point_symmetric(move.point, state.board.size)
            if sym != move.point and state.board.is_empty(sym):
                raise IllegalMoveError(
                    "symmetric_single_blocked",
                    f"{sym} is free, so {move.point} must be played as a pair")


def _forced_options(board: BoardState, placed: Tuple[Coord, Coord],
                    kept_this_move: List[Coord],
                    ruleset: Ruleset) -> Optional[Tuple[Coord, ...]]:
    if not kept_this_move:
        return None
    wide = ruleset.kind == "weak" and ruleset.wide_step3
    kept_set = set(kept_this_move)
    eligible = []
    for p in placed:
        reach = neighbors(p, board.size)
        if wide:
            reach = reach + diagonal_neighbors(p, board.size)
        if any(n in kept_set for n in reach):
            eligible.append(p)
    return tuple(eligible) if eligible else None


def _run_collapse(board: BoardState, placed: Tuple[Coord, ...], placed_pair: Optional[int],
                  mover: Color, ruleset: Ruleset, provider: Optional[ChoiceProvider],
                  observer: Optional[Observer], events: List[CollapseEvent]) -> None:
    # Both steps' pair lists are fixed at placement time: steps 1-2 only
    # remove stones, which never brings a new pair into reach of the placed
    # points nor takes an already-affected one out of it.  A pair's id is
    # the move number that placed it, so sorting ids sorts by age.
    grid = board.grid
    own_pids: List[int] = []
    opp_pids: List[int] = []
    seen: Set[int] = set()
    for p in placed:
        for n in _reach(board, p, ruleset):
            occ = grid.get(n)
            if occ is not None:
                pid = occ.pair_id
                if pid is not None and pid != placed_pair and pid not in seen:
                    seen.add(pid)
                    (own_pids if occ.color is mover else opp_pids).append(pid)
    own_pids.sort()
    opp_pids.sort()

    kept_this_move: List[Coord] = []
    for step, owner, pids in ((1, mover, own_pids), (2, mover.opponent, opp_pids)):
        for pid in pids:
            pair = board.pairs[pid]
            kept = _ask(provider, ChoiceRequest(owner, pid, (pair.a, pair.b),
                                                step=step))
            removed = board.collapse_pair(pid, kept)
            ev = CollapseEvent(step, pid, kept, removed, owner)
            events.append(ev)
            kept_this_move.append(kept)
            if observer:
                observer(ev, board)
    if placed_pair is None:
        return
    forced = _forced_options(board, placed, kept_this_move, ruleset)  # type: ignore[arg-type]
    pair = board.pairs[placed_pair]
    kept = _ask(provider, ChoiceRequest(mover, placed_pair, (pair.a, pair.b),
                                        forced, step=3))
    removed = board.collapse_pair(placed_pair, kept)
    ev = CollapseEvent(3, placed_pair, kept, removed, mover)
    events.append(ev)
    if observer:
        observer(ev, board)


def apply_move(state: GameState, move: Move,
               provider: Optional[ChoiceProvider] = None,
               observer: Optional[Observer] = None
               ) -> Tuple[GameState, List[CollapseEvent], List[Coord]]:
    """Apply one move.  Returns (new state, collapse events, captured points).

    Raises IllegalMoveError with a stable reason code (`game_over`,
    `wrong_move_type`, `off_board`, `same_point`, `occupied`, `suicide`,
    `superko`, ...) and leaves `state` untouched.  The provider is consulted
    once per collapsing pair, in rule order.
    """
    if state.status != ONGOING:
        raise IllegalMoveError("game_over")
    mover = state.to_move
    n = state.move_number + 1

    if isinstance(move, Pass):
        passes = state.consecutive_passes + 1
        status = FINISHED if passes >= 2 else ONGOING
        s = GameState(state.board, mover.opponent, state.komi, state.ruleset,
                      state.superko, passes, n, status, None,
                      state.history_hashes, state.history_forms)
        return s, [], []

    if isinstance(move, Resign):
        s = GameState(state.board, mover.opponent, state.komi, state.ruleset,
                      state.superko, state.consecutive_passes, n, FINISHED,
                      mover.opponent, state.history_hashes, state.history_forms)
        return s, [], []

    _check_shape(state, move, mover)
    board = state.board.copy()
    events: List[CollapseEvent] = []

    if isinstance(move, PlacePair):
        a, b = move.a, move.b
        if not (board.in_bounds(a) and board.in_bounds(b)):
            raise IllegalMoveError("off_board", f"{a} {b}")
        if a == b:
            raise IllegalMoveError("same_point", str(a))
        if not board.is_empty(a):
            raise IllegalMoveError("occupied", str(a))
        if not board.is_empty(b):
            raise IllegalMoveError("occupied", str(b))
        pair_id = n
        board._place_pair_fast(a, b, mover, pair_id, n)
        placed: Tuple[Coord, ...] = (a, b)
        if collapse_trigger(board, placed, state.ruleset):
            _run_collapse(board, placed, pair_id, mover, state.ruleset,
                          provider, observer, events)
    else:  # PlaceSingle
        p = move.point
        if not board.in_bounds(p):
            raise IllegalMoveError("off_board", str(p))
        if not board.is_empty(p):
            raise IllegalMoveError("occupied", str(p))
        board.place_singleton(p, mover)
        placed = (p,)
        if collapse_trigger(board, placed, state.ruleset):
            _run_collapse(board, placed, None, mover, state.ruleset,
                          provider, observer, events)

    removed, suicide = capture_scan(board, mover)
    if suicide:
        raise IllegalMoveError("suicide")

    h, form = _position_identity(board, mover.opponent, state.superko)
    hashes = state.history_hashes
    for i, past in enumerate(hashes):
        if past == h and state.history_forms[i] == form:
            raise IllegalMoveError("superko")

    s = GameState(board, mover.opponent, state.komi, state.ruleset, state.superko,
                  0, n, ONGOING, None, hashes + (h,), state.history_forms + (form,))
    return s, events, removed


# -- legality ----------------------------------------------------------------


class _ScriptProvider:
    """Replays a fixed decision prefix, then takes first options while
    recording branch widths, so a driver can enumerate every resolution."""

    __slots__ = ("decisions", "pos")

    def __init__(self, decisions: List[List[int]]):
        self.decisions = decisions
        self.pos = 0

    def answer(self, request: ChoiceRequest) -> Coord:
        allowed = request.allowed
        if self.pos < len(self.decisions):
            idx = self.decisions[self.pos][0]
        else:
            self.decisions.append([0, len(allowed)])
            idx = 0
        self.pos += 1
        return allowed[idx]


def resolution_exists(state: GameState, move: Move) -> bool:
    """True iff some sequence of collapse choices lets `move` resolve into a
    legal position."""
    decisions: List[List[int]] = []
    while True:
        prov = _ScriptProvider(decisions)
        try:
            apply_move(state, move, prov)
            return True
        except IllegalMoveError:
            pass
        while decisions and decisions[-1][0] + 1 >= decisions[-1][1]:
            decisions.pop()
        if not decisions:
            return False
        decisions[-1][0] += 1


def legal_moves(state: GameState) -> Set[Move]:
    """Every legal move.  A placement counts as legal when at least one
    choice resolution avoids suicide and repetition; pair moves are reported
    with their points in ascending order."""
    if state.status != ONGOING:
        return set()
    moves: Set[Move] = {Pass(), Resign()}
    empties = state.board.empties()
    rs = state.ruleset
    candidates: List[Move] = []
    if rs.kind in ("standard", "weak") or (
            rs.kind == "semiquantum" and state.to_move is rs.entangled_player):
        for i in range(len(empties)):
            for j in range(i + 1, len(empties)):
                candidates.append(PlacePair(empties[i], empties[j]))
    elif rs.kind == "semiquantum":
        candidates = [PlaceSingle(p) for p in empties]
    else:  # symmetric
        size = state.board.size
        for p in empties:
            sym = point_symmetric(p, size)
            if p < sym and state.board.is_empty(sym):
                candidates.append(PlacePair(p, sym))
            if p == sym or not state.board.is_empty(sym):
                candidates.append(PlaceSingle(p))
    for mv in candidates:
        if resolution_exists(state, mv):
            moves.add(mv)
    return moves
