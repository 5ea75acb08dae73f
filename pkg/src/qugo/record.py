"""Plain-text game records (.qgr), replay, and board diagrams.

A record stores, for every pair entry, which half was eventually kept
(the ``*`` marker).  That single bit per pair is enough to replay a game
deterministically: whenever a pair collapses, the replay answers with its
marked point.  Which moves *induced* collapses is derivable, so it is not
stored; the serializer can annotate such entries with a trailing ``!``.

Grammar, one entry per line after the headers::

    size=6
    komi=0
    variant=standard
    B 1: D3* C2      pair entry, kept marker on exactly one point
    W 2: PASS
    B 3: R           resignation
    W 4: C4*         single-stone entry (variants only)

``#`` starts a comment.  Blank lines are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .board import BoardState, Color, Coord, MAX_SIZE, MIN_SIZE
from .errors import (
    IllegalMoveError,
    InvalidCoordinateError,
    ParseError,
    ProtocolViolationError,
    ReplayDivergenceError,
)
from .rules import (
    FINISHED,
    ChoiceRequest,
    CollapseEvent,
    GameState,
    Move,
    Observer,
    Pass,
    PlacePair,
    PlaceSingle,
    Resign,
    Ruleset,
    apply_move,
)

VARIANT_TAGS = ("standard", "weak", "symmetric", "semiquantum-black", "semiquantum-white")


@dataclass(frozen=True)
class PairBody:
    p1: Coord
    p2: Coord
    kept_index: int  # 1 or 2

    @property
    def kept(self) -> Coord:
        return self.p1 if self.kept_index == 1 else self.p2

    @property
    def discarded(self) -> Coord:
        return self.p2 if self.kept_index == 1 else self.p1


@dataclass(frozen=True)
class SingleBody:
    point: Coord


@dataclass(frozen=True)
class PassBody:
    pass


@dataclass(frozen=True)
class ResignBody:
    pass


EntryBody = Union[PairBody, SingleBody, PassBody, ResignBody]


@dataclass(frozen=True)
class MoveRecordEntry:
    color: Color
    number: int
    body: EntryBody


@dataclass(frozen=True)
class GameRecord:
    size: int
    komi: float
    variant: str = "standard"
    handicap: Tuple[Coord, ...] = ()
    entries: Tuple[MoveRecordEntry, ...] = ()

    @property
    def first_color(self) -> Color:
        return Color.WHITE if self.handicap else Color.BLACK

    def ruleset(self) -> Ruleset:
        return Ruleset.from_tag(self.variant)

    def prefix(self, through: int) -> "GameRecord":
        """The record truncated to entries numbered <= through."""
        return GameRecord(self.size, self.komi, self.variant, self.handicap,
                          tuple(e for e in self.entries if e.number <= through))


def _format_komi(komi: float) -> str:
    return f"{komi:g}"


def parse_record(text: str) -> GameRecord:
    size: Optional[int] = None
    komi: float = 0.0
    variant = "standard"
    handicap: Tuple[Coord, ...] = ()
    entries: List[MoveRecordEntry] = []
    expected_number = 1
    expected_color: Optional[Color] = None
    seen_header = {"komi": False}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line and line.split("=", 1)[0].strip() in (
                "size", "komi", "variant", "handicap"):
            if entries:
                raise ParseError(lineno, "header-after-entries", line)
            key, value = (part.strip() for part in line.split("=", 1))
            if key == "size":
                if not value.isdigit() or not MIN_SIZE <= int(value) <= MAX_SIZE:
                    raise ParseError(lineno, "bad-header", f"size {value!r}")
                size = int(value)
            elif key == "komi":
                try:
                    komi = float(value)
                except ValueError:
                    raise ParseError(lineno, "bad-header", f"komi {value!r}")
                seen_header["komi"] = True
            elif key == "variant":
                if value not in VARIANT_TAGS:
                    raise ParseError(lineno, "bad-header", f"variant {value!r}")
                variant = value
            elif key == "handicap":
                if size is None:
                    raise ParseError(lineno, "bad-header", "handicap before size")
                pts = []
                for tok in value.split(","):
                    try:
                        pts.append(Coord.parse(tok, size))
                    except InvalidCoordinateError as e:
                        raise ParseError(lineno, "bad-coordinate", str(e))
                if len(set(pts)) != len(pts):
                    raise ParseError(lineno, "duplicate-point", value)
                handicap = tuple(pts)
            continue

        if size is None:
            raise ParseError(lineno, "bad-header", "no size header before entries")
        entry = _parse_entry(line, lineno, size)
        if expected_color is None:
            expected_color = Color.WHITE if handicap else Color.BLACK
        if entry.number != expected_number:
            raise ParseError(lineno, "number-gap",
                             f"expected {expected_number}, got {entry.number}")
        if entry.color is not expected_color:
            raise ParseError(lineno, "wrong-color",
                             f"move {entry.number} should be {expected_color.value}")
        entries.append(entry)
        expected_number += 1
        expected_color = expected_color.opponent

    if size is None:
        raise ParseError(0, "bad-header", "missing size header")
    return GameRecord(size, komi, variant, handicap, tuple(entries))


def _parse_entry(line: str, lineno: int, size: int) -> MoveRecordEntry:
    head, sep, rest = line.partition(":")
    if not sep:
        raise ParseError(lineno, "bad-entry", line)
    head_parts = head.split()
    if len(head_parts) != 2 or head_parts[0] not in ("B", "W") or not head_parts[1].isdigit():
        raise ParseError(lineno, "bad-entry", head.strip())
    color = Color(head_parts[0])
    number = int(head_parts[1])

    tokens = rest.split()
    if tokens and tokens[-1] == "!":  # derived induced-collapse note
        tokens = tokens[:-1]
    if not tokens:
        raise ParseError(lineno, "bad-entry", "empty move body")

    if tokens == ["PASS"]:
        return MoveRecordEntry(color, number, PassBody())
    if tokens == ["R"]:
        return MoveRecordEntry(color, number, ResignBody())

    marked: List[bool] = []
    coords: List[Coord] = []
    for tok in tokens:
        starred = tok.endswith("*")
        if starred:
            tok = tok[:-1]
        try:
            coords.append(Coord.parse(tok, size))
        except InvalidCoordinateError as e:
            raise ParseError(lineno, "bad-coordinate", str(e))
        marked.append(starred)

    if len(coords) == 1:
        if not marked[0]:
            raise ParseError(lineno, "missing-kept-marker", line)
        return MoveRecordEntry(color, number, SingleBody(coords[0]))
    if len(coords) == 2:
        if coords[0] == coords[1]:
            raise ParseError(lineno, "duplicate-point", str(coords[0]))
        if marked[0] and marked[1]:
            raise ParseError(lineno, "duplicate-kept-marker", line)
        if not (marked[0] or marked[1]):
            raise ParseError(lineno, "missing-kept-marker", line)
        return MoveRecordEntry(color, number, PairBody(coords[0], coords[1],
                                                       1 if marked[0] else 2))
    raise ParseError(lineno, "bad-entry", line)


def serialize_record(record: GameRecord, induced: Sequence[int] = ()) -> str:
    """Canonical text form.  `induced` lists entry numbers to annotate with
    a trailing ``!`` (cosmetic only; the parser discards it)."""
    induced_set = set(induced)
    lines = [f"size={record.size}", f"komi={_format_komi(record.komi)}",
             f"variant={record.variant}"]
    if record.handicap:
        lines.append("handicap=" + ",".join(str(c) for c in record.handicap))
    for e in record.entries:
        body = e.body
        if isinstance(body, PassBody):
            text = "PASS"
        elif isinstance(body, ResignBody):
            text = "R"
        elif isinstance(body, SingleBody):
            text = f"{body.point}*"
        else:
            m1 = "*" if body.kept_index == 1 else ""
            m2 = "*" if body.kept_index == 2 else ""
            text = f"{body.p1}{m1} {body.p2}{m2}"
        note = " !" if e.number in induced_set else ""
        lines.append(f"{e.color.value} {e.number}: {text}{note}")
    return "\n".join(lines) + "\n"


# -- replay ------------------------------------------------------------------


class RecordChoices:
    """Answers every collapse request with the record's kept marker."""

    def __init__(self, kept_by_pair: Dict[int, Coord]):
        self.kept_by_pair = kept_by_pair

    def answer(self, request: ChoiceRequest) -> Coord:
        kept = self.kept_by_pair.get(request.pair_id)
        if kept is None:
            raise ProtocolViolationError(
                f"record has no kept marker for pair {request.pair_id}")
        return kept


@dataclass
class ReplayResult:
    state: GameState
    events: List[Tuple[int, CollapseEvent]]  # (entry number, event)
    induced: Tuple[int, ...]  # entries whose placement collapsed another pair

    @property
    def board(self) -> BoardState:
        return self.state.board


def initial_state(record: GameRecord) -> GameState:
    return GameState.new(record.size, record.komi, record.ruleset(),
                         handicap=record.handicap)


def replay_steps(record: GameRecord, through: Optional[int] = None,
                 observer: Optional[Observer] = None
                 ) -> Iterator[Tuple[MoveRecordEntry, GameState,
                                     List[CollapseEvent]]]:
    """Step through a record one entry at a time, yielding each entry with
    the state after it and that move's collapse events.

    Raises ReplayDivergenceError, naming the entry and the violated rule,
    if any recorded move or kept marker is illegal at its turn.
    """
    entries = record.entries if through is None else record.prefix(through).entries
    kept_by_pair = {e.number: e.body.kept for e in entries
                    if isinstance(e.body, PairBody)}
    provider = RecordChoices(kept_by_pair)
    state = initial_state(record)
    for e in entries:
        if state.status == FINISHED:
            raise ReplayDivergenceError(e.number, "the game already ended")
        if e.color is not state.to_move:
            raise ReplayDivergenceError(e.number, f"not {e.color.value}'s turn")
        move = entry_move(e)
        try:
            state, move_events, _removed = apply_move(state, move, provider, observer)
        except IllegalMoveError as err:
            raise ReplayDivergenceError(e.number, err.code) from err
        except ProtocolViolationError as err:
            raise ReplayDivergenceError(e.number, f"kept marker rejected: {err}") from err
        yield e, state, move_events


def replay(record: GameRecord, through: Optional[int] = None,
           observer: Optional[Observer] = None) -> ReplayResult:
    """Rebuild the game a record describes, whole."""
    state = initial_state(record)
    events: List[Tuple[int, CollapseEvent]] = []
    induced: List[int] = []
    for e, state, move_events in replay_steps(record, through, observer):
        for ev in move_events:
            events.append((e.number, ev))
        if any(ev.step in (1, 2) for ev in move_events):
            induced.append(e.number)
    return ReplayResult(state, events, tuple(induced))


def entry_move(e: MoveRecordEntry) -> Move:
    """The engine move an entry denotes (kept markers aside)."""
    body = e.body
    if isinstance(body, PairBody):
        return PlacePair(body.p1, body.p2)
    if isinstance(body, SingleBody):
        return PlaceSingle(body.point)
    if isinstance(body, PassBody):
        return Pass()
    return Resign()


def entry_for(color: Color, number: int, move: Move,
              kept_by_pair: Dict[int, Coord]) -> MoveRecordEntry:
    """Record entry for a played move.  `kept_by_pair` maps pair ids to the
    half each collapse actually kept; a pair whose fate was never chosen
    (still entangled, or dissolved by capture) gets its marker on the first
    half, where it is pure bookkeeping."""
    if isinstance(move, PlacePair):
        kept = kept_by_pair.get(number, move.a)
        body = PairBody(move.a, move.b, 1 if kept == move.a else 2)
        return MoveRecordEntry(color, number, body)
    if isinstance(move, PlaceSingle):
        return MoveRecordEntry(color, number, SingleBody(move.point))
    if isinstance(move, Pass):
        return MoveRecordEntry(color, number, PassBody())
    return MoveRecordEntry(color, number, ResignBody())


def result_of(record: GameRecord, state: GameState):
    """(result string, fully collapsed end state) for a finished game, or
    (None, state) if the record stops while play is still open.  Leftover
    pairs collapse per the record's kept markers."""
    from .scoring import finalize_pairs, resignation_string, score

    if state.status != FINISHED:
        return None, state
    if state.winner_by_resignation is not None:
        return resignation_string(state.winner_by_resignation), state
    if state.board.pairs:
        kept = {e.number: e.body.kept for e in record.entries
                if isinstance(e.body, PairBody)}
        provider = RecordChoices(kept)
        state, _ = finalize_pairs(state, provider, provider)
    return score(state).result_string(), state


def record_from_game(size: int, komi: float, variant: str,
                     entries: Sequence[MoveRecordEntry],
                     handicap: Sequence[Coord] = ()) -> GameRecord:
    return GameRecord(size, komi, variant, tuple(handicap), tuple(entries))


# -- diagrams ----------------------------------------------------------------


def render_ascii(board: BoardState) -> str:
    """Fixed-width diagram: X/O stones, x/o entangled halves, '.' empty.
    Top row first; letters along the bottom margin."""
    size = board.size
    out = []
    for row in range(size - 1, -1, -1):
        cells = []
        for col in range(size):
            occ = board.get(Coord(col, row))
            if occ is None:
                cells.append(".")
            elif occ.color is Color.BLACK:
                cells.append("x" if occ.entangled else "X")
            else:
                cells.append("o" if occ.entangled else "O")
        out.append(f"{row + 1:2d}  " + " ".join(cells))
    from .board import COLUMN_LETTERS
    out.append("    " + " ".join(COLUMN_LETTERS[:size]))
    return "\n".join(out) + "\n"
