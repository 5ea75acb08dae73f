"""Board geometry, occupancy and capture mechanics.

Stones arrive on the board either as singletons or as halves of an
entangled pair.  For connectivity, liberties and capture they behave like
ordinary stones; entanglement only matters to the collapse rules layered
on top of this module.
"""

from __future__ import annotations

import random
from enum import Enum
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Set, Tuple

from .errors import EmptyPointError, InvalidCoordinateError

# Column letters skip 'I', the traditional Go convention.
COLUMN_LETTERS = "ABCDEFGHJKLMNOPQRSTUVWXYZ"
MIN_SIZE = 3
MAX_SIZE = 25
DEFAULT_SIZE = 19

_M64 = (1 << 64) - 1


class Color(Enum):
    BLACK = "B"
    WHITE = "W"

    @property
    def opponent(self) -> "Color":
        return Color.WHITE if self is Color.BLACK else Color.BLACK

    def __str__(self) -> str:
        return self.value


class Coord(NamedTuple):
    """Zero-based (col, row).  Row 0 is the bottom edge, printed as '1'."""

    col: int
    row: int

    def __str__(self) -> str:
        return f"{COLUMN_LETTERS[self.col]}{self.row + 1}"

    @classmethod
    def parse(cls, text: str, size: int = MAX_SIZE) -> "Coord":
        text = text.strip().upper()
        if len(text) < 2 or not text[0].isalpha() or not text[1:].isdigit():
            raise InvalidCoordinateError(f"malformed coordinate {text!r}")
        col = COLUMN_LETTERS.find(text[0])
        row = int(text[1:]) - 1
        if col < 0 or col >= size or row < 0 or row >= size:
            raise InvalidCoordinateError(f"coordinate {text!r} is off a {size}x{size} board")
        return cls(col, row)


class Occupant(NamedTuple):
    color: Color
    pair_id: Optional[int]  # None for a collapsed / plain stone

    @property
    def entangled(self) -> bool:
        return self.pair_id is not None


class Pair(NamedTuple):
    color: Color
    a: Coord
    b: Coord
    move_number: int

    def partner_of(self, c: Coord) -> Coord:
        if c == self.a:
            return self.b
        if c == self.b:
            return self.a
        raise ValueError(f"{c} is not part of this pair")


_neighbor_cache: Dict[int, List[Tuple[Coord, ...]]] = {}
_diagonal_cache: Dict[int, List[Tuple[Coord, ...]]] = {}
_neighbor_idx_cache: Dict[int, List[Tuple[int, ...]]] = {}


def _build_offsets(size: int, offsets) -> List[Tuple[Coord, ...]]:
    table: List[Tuple[Coord, ...]] = []
    for col in range(size):
        for row in range(size):
            pts = []
            for dc, dr in offsets:
                c, r = col + dc, row + dr
                if 0 <= c < size and 0 <= r < size:
                    pts.append(Coord(c, r))
            table.append(tuple(sorted(pts)))
    return table


def neighbors(c: Coord, size: int) -> Tuple[Coord, ...]:
    """Orthogonal neighbors in ascending (col, row) order."""
    try:
        table = _neighbor_cache[size]
    except KeyError:
        table = _neighbor_cache.setdefault(
            size, _build_offsets(size, ((-1, 0), (1, 0), (0, -1), (0, 1))))
    return table[c[0] * size + c[1]]


def diagonal_neighbors(c: Coord, size: int) -> Tuple[Coord, ...]:
    """Diagonal neighbors in ascending (col, row) order."""
    try:
        table = _diagonal_cache[size]
    except KeyError:
        table = _diagonal_cache.setdefault(
            size, _build_offsets(size, ((-1, -1), (-1, 1), (1, -1), (1, 1))))
    return table[c[0] * size + c[1]]


def all_coords(size: int) -> List[Coord]:
    """Every point, ascending col then row."""
    return [Coord(c, r) for c in range(size) for r in range(size)]


def neighbor_indices(size: int) -> List[Tuple[int, ...]]:
    """Orthogonal neighbors as flat cell indices (idx = col * size + row)."""
    try:
        return _neighbor_idx_cache[size]
    except KeyError:
        table = [tuple(n[0] * size + n[1] for n in neighbors(Coord(i // size, i % size), size))
                 for i in range(size * size)]
        return _neighbor_idx_cache.setdefault(size, table)


class _Zobrist:
    """Fixed-seed hash tables; one instance per board size."""

    _instances: Dict[int, "_Zobrist"] = {}

    def __init__(self, size: int):
        rng = random.Random(0x6F5902AC ^ (size * 0x9E3779B9))
        n = size * size
        self.black = [rng.getrandbits(64) for _ in range(n)]
        self.white = [rng.getrandbits(64) for _ in range(n)]
        self.pair = [rng.getrandbits(64) for _ in range(n)]
        self.to_move = rng.getrandbits(64)

    @classmethod
    def get(cls, size: int) -> "_Zobrist":
        z = cls._instances.get(size)
        if z is None:
            z = cls._instances[size] = cls(size)
        return z


def _mix64(x: int) -> int:
    x &= _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


class _BitGeo:
    """Shift masks for one board size; bit i covers cell index i."""

    _instances: Dict[int, "_BitGeo"] = {}

    def __init__(self, size: int):
        n = size * size
        self.size = size
        self.full = (1 << n) - 1
        up = down = 0
        for i in range(n):
            if i % size != size - 1:
                up |= 1 << i  # may shift toward row+1
            if i % size != 0:
                down |= 1 << i  # may shift toward row-1
        self.canup = up
        self.candown = down

    @classmethod
    def get(cls, size: int) -> "_BitGeo":
        g = cls._instances.get(size)
        if g is None:
            g = cls._instances[size] = cls(size)
        return g

    def dilate(self, bits: int) -> int:
        return (((bits & self.canup) << 1) | ((bits & self.candown) >> 1)
                | (bits >> self.size) | ((bits << self.size) & self.full))


def _reach_empty(stones: int, empty: int, geo: _BitGeo) -> int:
    """Fixpoint of empty points plus stones connected to them through
    `stones`; a stone outside the result has no liberty."""
    r = empty
    while True:
        nxt = r | (geo.dilate(r) & stones)
        if nxt == r:
            return r
        r = nxt


def _iter_bits(bits: int):
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


class BoardState:
    """Mutable board; callers that need value semantics copy() first."""

    __slots__ = ("size", "grid", "pairs", "captures", "zhash",
                 "black_bits", "white_bits", "_cells", "_z")

    def __init__(self, size: int = DEFAULT_SIZE):
        if not MIN_SIZE <= size <= MAX_SIZE:
            raise InvalidCoordinateError(f"board size {size} out of range {MIN_SIZE}..{MAX_SIZE}")
        self.size = size
        self.grid: Dict[Coord, Occupant] = {}
        self.pairs: Dict[int, Pair] = {}
        self.captures: Dict[Color, int] = {Color.BLACK: 0, Color.WHITE: 0}
        self.black_bits = 0
        self.white_bits = 0
        self._cells = bytearray(size * size)  # 0 empty, 1 black, 2 white
        self._z = _Zobrist.get(size)
        self.zhash = 0

    def copy(self) -> "BoardState":
        b = BoardState.__new__(BoardState)
        b.size = self.size
        b.grid = dict(self.grid)
        b.pairs = dict(self.pairs)
        b.captures = dict(self.captures)
        b.black_bits = self.black_bits
        b.white_bits = self.white_bits
        b._cells = bytearray(self._cells)
        b._z = self._z
        b.zhash = self.zhash
        return b

    # -- queries ---------------------------------------------------------

    def get(self, c: Coord) -> Optional[Occupant]:
        return self.grid.get(c)

    def is_empty(self, c: Coord) -> bool:
        return c not in self.grid

    def in_bounds(self, c: Coord) -> bool:
        return 0 <= c[0] < self.size and 0 <= c[1] < self.size

    def stones(self) -> Iterator[Tuple[Coord, Occupant]]:
        return iter(sorted(self.grid.items()))

    def empties(self) -> List[Coord]:
        size = self.size
        cells = self._cells
        return [Coord(i // size, i % size) for i in range(size * size) if not cells[i]]

    def empty_indices(self) -> List[int]:
        """Empty cells as flat indices (idx = col * size + row), ascending."""
        cells = self._cells
        return [i for i in range(len(cells)) if not cells[i]]

    def stone_count(self, color: Optional[Color] = None) -> int:
        if color is None:
            return len(self.grid)
        code = 1 if color is Color.BLACK else 2
        return sum(1 for v in self._cells if v == code)

    def pair_of(self, c: Coord) -> Optional[Pair]:
        occ = self.grid.get(c)
        if occ is None or occ.pair_id is None:
            return None
        return self.pairs[occ.pair_id]

    # -- mutation --------------------------------------------------------

    def _put(self, c: Coord, occ: Occupant) -> None:
        self.grid[c] = occ
        idx = c[0] * self.size + c[1]
        if occ.color is Color.BLACK:
            self._cells[idx] = 1
            self.black_bits |= 1 << idx
            self.zhash ^= self._z.black[idx]
        else:
            self._cells[idx] = 2
            self.white_bits |= 1 << idx
            self.zhash ^= self._z.white[idx]

    def _take(self, c: Coord) -> Occupant:
        occ = self.grid.pop(c)
        idx = c[0] * self.size + c[1]
        self._cells[idx] = 0
        if occ.color is Color.BLACK:
            self.black_bits &= ~(1 << idx)
            self.zhash ^= self._z.black[idx]
        else:
            self.white_bits &= ~(1 << idx)
            self.zhash ^= self._z.white[idx]
        return occ

    def _pair_term(self, a: Coord, b: Coord) -> int:
        size = self.size
        return _mix64(self._z.pair[a[0] * size + a[1]] + self._z.pair[b[0] * size + b[1]])

    def place_singleton(self, c: Coord, color: Color) -> None:
        if not self.in_bounds(c):
            raise InvalidCoordinateError(f"{c} off board")
        if c in self.grid:
            raise ValueError(f"{c} already occupied")
        self._put(c, Occupant(color, None))

    def place_pair(self, a: Coord, b: Coord, color: Color, pair_id: int,
                   move_number: int) -> None:
        if a == b:
            raise ValueError("pair needs two distinct points")
        if pair_id in self.pairs:
            raise ValueError(f"pair id {pair_id} already in use")
        for c in (a, b):
            if not self.in_bounds(c):
                raise InvalidCoordinateError(f"{c} off board")
            if c in self.grid:
                raise ValueError(f"{c} already occupied")
        self._place_pair_fast(a, b, color, pair_id, move_number)

    def _place_pair_fast(self, a: Coord, b: Coord, color: Color, pair_id: int,
                         move_number: int) -> None:
        """Placement without validation; caller has checked both points."""
        self._put(a, Occupant(color, pair_id))
        self._put(b, Occupant(color, pair_id))
        self.pairs[pair_id] = Pair(color, a, b, move_number)
        self.zhash ^= self._pair_term(a, b)

    def collapse_pair(self, pair_id: int, kept: Coord) -> Coord:
        """Resolve a pair: keep one half, remove the other.  Returns the removed point."""
        pair = self.pairs.pop(pair_id)
        removed = pair.partner_of(kept)
        self.zhash ^= self._pair_term(pair.a, pair.b)
        self._take(removed)
        self.grid[kept] = Occupant(pair.color, None)
        return removed

    def remove_stones(self, coords: Iterable[Coord], captured_by: Optional[Color] = None) -> None:
        """Remove stones (captures).  A surviving partner of a removed half
        becomes a singleton."""
        coords = set(coords)
        for c in coords:
            occ = self.grid.get(c)
            if occ is None:
                continue
            if occ.pair_id is not None:
                # pop tolerates both halves dying in the same sweep
                pair = self.pairs.pop(occ.pair_id, None)
                if pair is not None:
                    self.zhash ^= self._pair_term(pair.a, pair.b)
                    partner = pair.partner_of(c)
                    if partner not in coords:
                        self.grid[partner] = Occupant(pair.color, None)
            self._take(c)
            if captured_by is not None:
                self.captures[captured_by] += 1

    # -- canonical identity ---------------------------------------------

    def pairing_partition(self) -> Tuple[Tuple[int, int], ...]:
        size = self.size
        out = []
        for pair in self.pairs.values():
            ia = pair.a[0] * size + pair.a[1]
            ib = pair.b[0] * size + pair.b[1]
            out.append((ia, ib) if ia < ib else (ib, ia))
        out.sort()
        return tuple(out)

    def canonical_form(self) -> Tuple[bytes, Tuple[Tuple[int, int], ...]]:
        """Identity for repetition checks: occupancy colours plus the
        unordered pairing partition.  Pair ids do not participate."""
        return bytes(self._cells), self.pairing_partition()

    def compute_hash(self) -> int:
        """Hash rebuilt from scratch; must equal the incremental zhash."""
        h = 0
        size = self.size
        for c, occ in self.grid.items():
            idx = c[0] * size + c[1]
            h ^= (self._z.black if occ.color is Color.BLACK else self._z.white)[idx]
        for pair in self.pairs.values():
            h ^= self._pair_term(pair.a, pair.b)
        return h

    def check_integrity(self) -> None:
        """Raise if grid and pair registry disagree (test/validator hook)."""
        seen = {}
        for c, occ in self.grid.items():
            if occ.pair_id is not None:
                pair = self.pairs.get(occ.pair_id)
                assert pair is not None, f"stone {c} references dead pair {occ.pair_id}"
                assert c in (pair.a, pair.b), f"stone {c} not a member of pair {occ.pair_id}"
                assert occ.color is pair.color, f"colour mismatch on pair {occ.pair_id}"
                seen.setdefault(occ.pair_id, set()).add(c)
        for pid, pair in self.pairs.items():
            assert seen.get(pid) == {pair.a, pair.b}, f"pair {pid} not fully on the board"
        assert self.zhash == self.compute_hash(), "incremental hash drifted"
        bb = ww = 0
        for c, occ in self.grid.items():
            bit = 1 << (c[0] * self.size + c[1])
            if occ.color is Color.BLACK:
                bb |= bit
            else:
                ww |= bit
        assert (bb, ww) == (self.black_bits, self.white_bits), "bitboards drifted"


# -- connectivity and capture -----------------------------------------------


def group_of(board: BoardState, c: Coord) -> Set[Coord]:
    """Solidly connected stones containing c (entangled halves included)."""
    occ = board.grid.get(c)
    if occ is None:
        raise EmptyPointError(f"{c} is empty")
    color = occ.color
    size = board.size
    grid = board.grid
    group = {c}
    frontier = [c]
    while frontier:
        cur = frontier.pop()
        for n in neighbors(cur, size):
            if n not in group:
                o = grid.get(n)
                if o is not None and o.color is color:
                    group.add(n)
                    frontier.append(n)
    return group


def liberties(board: BoardState, group: Iterable[Coord]) -> Set[Coord]:
    size = board.size
    grid = board.grid
    libs = set()
    for c in group:
        for n in neighbors(c, size):
            if n not in grid:
                libs.add(n)
    return libs


class CaptureResult(NamedTuple):
    board: "BoardState"
    removed: List[Coord]
    suicide: bool


def capture_scan(board: BoardState, mover: Color) -> Tuple[List[Coord], bool]:
    """Remove opponent stones left without liberties, then report whether
    any mover stone has none (suicide).  Mutates `board`; removed points
    come back in ascending order."""
    size = board.size
    geo = _BitGeo.get(size)
    if mover is Color.BLACK:
        own, opp = board.black_bits, board.white_bits
    else:
        own, opp = board.white_bits, board.black_bits

    removed: List[Coord] = []
    if opp:
        empty = geo.full & ~(own | opp)
        dead = opp & ~_reach_empty(opp, empty, geo)
        if dead:
            coords = [Coord(i // size, i % size) for i in _iter_bits(dead)]
            board.remove_stones(coords, captured_by=mover)
            removed = coords

    suicide = False
    if own:
        empty = geo.full & ~(board.black_bits | board.white_bits)
        suicide = bool(own & ~_reach_empty(own, empty, geo))
    return removed, suicide


def zero_liberty_stones(board: BoardState) -> List[Coord]:
    """Stones whose group has no liberty, ascending; empty on any position
    the rules can actually leave behind."""
    size = board.size
    geo = _BitGeo.get(size)
    empty = geo.full & ~(board.black_bits | board.white_bits)
    dead = (board.black_bits & ~_reach_empty(board.black_bits, empty, geo)) \
        | (board.white_bits & ~_reach_empty(board.white_bits, empty, geo))
    return [Coord(i // size, i % size) for i in _iter_bits(dead)]


def resolve_captures(board: BoardState, mover: Color) -> CaptureResult:
    """Pure full-board capture pass: returns a new board, the removed points
    in ascending order, and a suicide flag (nothing is removed for suicide)."""
    work = board.copy()
    removed, suicide = capture_scan(work, mover)
    return CaptureResult(work, removed, suicide)
