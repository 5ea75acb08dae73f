"""Seeded self-play experiments over any ruleset.

Random streams are keyed by seat order (the player who moves first vs the
player who moves second), not by colour.  Swapping the colours in a config
while keeping the per-seat policies therefore replays the exact same games
with the colours exchanged, so signed margins negate under colour swap
when komi is zero.  Every stream seeds `random.Random` with a string, so
runs reproduce across platforms and processes.
"""

from __future__ import annotations

import io
import math
import random
import statistics
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

from .board import Color, Coord
from .errors import IllegalMoveError
from .rules import (
    ONGOING,
    ChoiceProvider,
    ChoiceRequest,
    FirstChoices,
    GameState,
    Move,
    Pass,
    PlacePair,
    PlaceSingle,
    RandomChoices,
    Ruleset,
    apply_move,
    point_symmetric,
)
from .scoring import finalize_pairs, score

POLICIES = ("uniform-random", "first-legal")


@dataclass(frozen=True)
class ExperimentConfig:
    ruleset: Ruleset
    size: int = 9
    komi: float = 7.5
    policy_black: str = "uniform-random"
    policy_white: str = "uniform-random"
    games: int = 1
    seed: str = "0"
    first_player: Color = Color.BLACK
    max_moves: Optional[int] = None  # default 4 * size^2
    attempts: int = 32  # placement tries per turn before passing

    def __post_init__(self):
        if self.games < 1:
            raise ValueError("game count must be at least 1")
        for p in (self.policy_black, self.policy_white):
            if p not in POLICIES:
                raise ValueError(f"unknown policy {p!r}")

    @property
    def move_cap(self) -> int:
        return self.max_moves if self.max_moves is not None else 4 * self.size * self.size

    def colour_swapped(self) -> "ExperimentConfig":
        """Same seats, opposite colours: the mirror run for symmetry checks."""
        return replace(self, policy_black=self.policy_white,
                       policy_white=self.policy_black,
                       first_player=self.first_player.opponent)


@dataclass(frozen=True)
class GameStats:
    index: int
    winner: str  # "B" | "W" | "D"
    margin: float  # signed, positive favours Black
    moves: int
    pairs_placed: int
    pairs_collapsed: int  # in-game collapses; end-of-game resolutions excluded
    collapse_moves: Tuple[int, ...] = ()  # move number of each collapse
    lifetimes: Tuple[int, ...] = ()  # collapse move minus placement move
    final_hash: int = 0


@dataclass(frozen=True)
class ExperimentSummary:
    config: ExperimentConfig
    games: Tuple[GameStats, ...]
    black_wins: int
    white_wins: int
    draws: int
    margin_mean: float
    margin_stderr: float
    collapse_hist: Tuple[Tuple[int, int], ...]  # (move number, collapse count)
    mean_lifetime: float


class _Router:
    """Sends each collapse decision to the provider of the pair's owner."""

    def __init__(self, by_color: Dict[Color, ChoiceProvider]):
        self.by_color = by_color

    def answer(self, request: ChoiceRequest) -> Coord:
        return self.by_color[request.chooser].answer(request)


@dataclass
class _Seat:
    policy: str
    rng: Optional[random.Random]
    provider: ChoiceProvider


def _make_seat(policy: str, stream: str) -> _Seat:
    if policy == "uniform-random":
        rng = random.Random(stream)
        return _Seat(policy, rng, RandomChoices(rng))
    return _Seat(policy, None, FirstChoices())


def _pair_candidates_symmetric(state: GameState) -> List[Move]:
    size = state.board.size
    out: List[Move] = []
    for p in state.board.empties():
        sym = point_symmetric(p, size)
        if p < sym and state.board.is_empty(sym):
            out.append(PlacePair(p, sym))
        elif p == sym or not state.board.is_empty(sym):
            out.append(PlaceSingle(p))
    return out


def _plays_pairs(state: GameState) -> bool:
    rs = state.ruleset
    if rs.kind in ("standard", "weak"):
        return True
    if rs.kind == "semiquantum":
        return state.to_move is rs.entangled_player
    return False  # symmetric mixes shapes; handled separately


def _try_move(state: GameState, move: Move, router: _Router):
    try:
        return apply_move(state, move, router)
    except IllegalMoveError:
        return None


def _pick_uniform(state: GameState, seat: _Seat, router: _Router, attempts: int):
    rng = seat.rng
    assert rng is not None
    if state.ruleset.kind == "symmetric":
        # the partner of flat index i under point symmetry is N-1-i
        size = state.board.size
        last = size * size - 1
        cells = state.board._cells
        cands: List[Tuple[int, int]] = []
        for i in state.board.empty_indices():
            s = last - i
            if i < s and not cells[s]:
                cands.append((i, s))
            elif i == s or cells[s]:
                cands.append((i, -1))
        for _ in range(attempts):
            if not cands:
                break
            ia, ib = cands[int(rng.random() * len(cands))]
            a = Coord(ia // size, ia % size)
            move = (PlaceSingle(a) if ib < 0
                    else PlacePair(a, Coord(ib // size, ib % size)))
            applied = _try_move(state, move, router)
            if applied is not None:
                return move, applied
        return None
    draw = rng.random
    size = state.board.size
    empties = state.board.empty_indices()
    n = len(empties)
    if _plays_pairs(state):
        if n < 2:
            return None
        for _ in range(attempts):
            si = int(draw() * n)
            sj = int(draw() * (n - 1))
            if sj >= si:
                sj += 1
            ia, ib = empties[si], empties[sj]
            if ib < ia:
                ia, ib = ib, ia
            # flat indices order exactly like (col, row), so this is canonical
            move = PlacePair(Coord(ia // size, ia % size), Coord(ib // size, ib % size))
            applied = _try_move(state, move, router)
            if applied is not None:
                return move, applied
    else:
        if n == 0:
            return None
        for _ in range(attempts):
            i = empties[int(draw() * n)]
            move = PlaceSingle(Coord(i // size, i % size))
            applied = _try_move(state, move, router)
            if applied is not None:
                return move, applied
    return None


def _pick_first_legal(state: GameState, router: _Router):
    if state.ruleset.kind == "symmetric":
        cands = _pair_candidates_symmetric(state)
    else:
        empties = state.board.empties()
        if _plays_pairs(state):
            cands = [PlacePair(empties[i], empties[j])
                     for i in range(len(empties)) for j in range(i + 1, len(empties))]
        else:
            cands = [PlaceSingle(p) for p in empties]
    for move in cands:
        applied = _try_move(state, move, router)
        if applied is not None:
            return move, applied
    return None


def play_game(cfg: ExperimentConfig, index: int) -> GameStats:
    """One fully scored game; pure function of (cfg, index)."""
    first_color = cfg.first_player
    first_policy = cfg.policy_black if first_color is Color.BLACK else cfg.policy_white
    second_policy = cfg.policy_white if first_color is Color.BLACK else cfg.policy_black
    seats = {
        first_color: _make_seat(first_policy, f"{cfg.seed}:{index}:first"),
        first_color.opponent: _make_seat(second_policy, f"{cfg.seed}:{index}:second"),
    }
    router = _Router({c: s.provider for c, s in seats.items()})

    state = GameState.new(cfg.size, cfg.komi, cfg.ruleset, first=first_color)
    pairs_placed = 0
    collapse_moves: List[int] = []
    lifetimes: List[int] = []
    while state.status == ONGOING:
        seat = seats[state.to_move]
        picked = None
        if state.move_number < cfg.move_cap:
            if seat.policy == "uniform-random":
                picked = _pick_uniform(state, seat, router, cfg.attempts)
            else:
                picked = _pick_first_legal(state, router)
        if picked is None:
            state, _, _ = apply_move(state, Pass())
            continue
        move, (new_state, events, _removed) = picked
        if isinstance(move, PlacePair):
            pairs_placed += 1
        for ev in events:
            collapse_moves.append(new_state.move_number)
            # a pair's id is the move number that placed it
            lifetimes.append(new_state.move_number - ev.pair_id)
        state = new_state

    final, _ = finalize_pairs(state, seats[Color.BLACK].provider,
                              seats[Color.WHITE].provider)
    result = score(final)
    if result.winner is Color.BLACK:
        winner, margin = "B", result.margin
    elif result.winner is Color.WHITE:
        winner, margin = "W", -result.margin
    else:
        winner, margin = "D", 0.0
    return GameStats(index, winner, margin, state.move_number, pairs_placed,
                     len(collapse_moves), tuple(collapse_moves), tuple(lifetimes),
                     final.board.zhash)


def run_experiment(cfg: ExperimentConfig) -> ExperimentSummary:
    """Play cfg.games seeded games and aggregate.  Aggregation reads the
    per-game rows in index order, so any execution order gives one summary."""
    games = tuple(play_game(cfg, i) for i in range(cfg.games))
    return summarize(cfg, games)


def summarize(cfg: ExperimentConfig, games: Tuple[GameStats, ...]) -> ExperimentSummary:
    margins = [g.margin for g in games]
    mean = statistics.mean(margins)
    stderr = (statistics.stdev(margins) / math.sqrt(len(margins))
              if len(margins) > 1 else 0.0)
    hist: Dict[int, int] = {}
    all_lifetimes: List[int] = []
    for g in games:
        for m in g.collapse_moves:
            hist[m] = hist.get(m, 0) + 1
        all_lifetimes.extend(g.lifetimes)
    mean_lifetime = statistics.mean(all_lifetimes) if all_lifetimes else 0.0
    return ExperimentSummary(
        cfg, games,
        black_wins=sum(1 for g in games if g.winner == "B"),
        white_wins=sum(1 for g in games if g.winner == "W"),
        draws=sum(1 for g in games if g.winner == "D"),
        margin_mean=mean,
        margin_stderr=stderr,
        collapse_hist=tuple(sorted(hist.items())),
        mean_lifetime=mean_lifetime,
    )


def summary_csv(summary: ExperimentSummary) -> str:
    """One row per game plus a commented summary block; byte-stable."""
    out = io.StringIO()
    out.write("index,winner,margin,moves,pairs_placed,pairs_collapsed\n")
    for g in summary.games:
        out.write(f"{g.index},{g.winner},{g.margin:g},{g.moves},"
                  f"{g.pairs_placed},{g.pairs_collapsed}\n")
    out.write(f"# games={len(summary.games)} black_wins={summary.black_wins}"
              f" white_wins={summary.white_wins} draws={summary.draws}\n")
    out.write(f"# margin_mean={summary.margin_mean:.6g}"
              f" margin_stderr={summary.margin_stderr:.6g}\n")
    out.write(f"# mean_lifetime={summary.mean_lifetime:.6g}\n")
    hist = ",".join(f"{m}:{n}" for m, n in summary.collapse_hist)
    out.write(f"# collapse_hist={hist}\n")
    return out.getvalue()


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from parsed JSON; unknown keys are rejected."""
    known = {"ruleset", "size", "komi", "policy_black", "policy_white",
             "games", "seed", "first_player", "max_moves", "attempts"}
    extra = set(data) - known
    if extra:
        raise ValueError(f"unknown config keys: {sorted(extra)}")
    kwargs = dict(data)
    kwargs["ruleset"] = Ruleset.from_tag(data.get("ruleset", "standard"))
    if "first_player" in data:
        kwargs["first_player"] = Color(data["first_player"])
    if "seed" in data:
        kwargs["seed"] = str(data["seed"])
    return ExperimentConfig(**kwargs)
