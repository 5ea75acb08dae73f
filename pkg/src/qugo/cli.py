"""The qgo command line: record replay, live play, state inspection,
self-play experiments, and the session server."""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .board import Color, Coord
from .errors import (IllegalMoveError, InvalidCoordinateError, QuantumGoError,
                     ReplayDivergenceError)
from .qstate import state_expression
from .record import (GameRecord, entry_for, initial_state, parse_record,
                     render_ascii, replay, replay_steps, result_of,
                     serialize_record)
from .rules import (ChoiceRequest, GameState, Move, ONGOING, Pass, PlacePair,
                    PlaceSingle, RandomChoices, Resign, Ruleset, apply_move,
                    resolution_exists)
from .scoring import finalize_pairs, resignation_string, score
from .selfplay import config_from_dict, run_experiment, summary_csv


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QuantumGoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgo", description="Quantum Go rules engine")
    sub = parser.add_subparsers(required=True)

    p = sub.add_parser("replay", help="replay a .qgr record")
    p.add_argument("file", type=Path)
    p.add_argument("--verify", action="store_true",
                   help="score the finished game and print the result string")
    p.add_argument("--diagrams", action="store_true",
                   help="print the board after every move that collapsed pairs")
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("play", help="play a game (human and/or random seats)")
    p.add_argument("--size", type=int, default=9)
    p.add_argument("--komi", type=float, default=7.5)
    p.add_argument("--variant", default="standard",
                   choices=("standard", "weak", "symmetric",
                            "semiquantum-black", "semiquantum-white"))
    p.add_argument("--seat-black", default="human", choices=("human", "random"))
    p.add_argument("--seat-white", default="random", choices=("human", "random"))
    p.add_argument("--seed", default="0")
    p.add_argument("--handicap", default="",
                   help="comma-separated points given to Black")
    p.add_argument("--max-moves", type=int, default=None,
                   help="random seats pass beyond this (default 4*size^2)")
    p.add_argument("--out", type=Path, default=Path("game.qgr"))
    p.set_defaults(func=_cmd_play)

    p = sub.add_parser("state", help="board or quantum state at a move")
    p.add_argument("file", type=Path)
    p.add_argument("--at", type=int, default=None, metavar="MOVE",
                   help="stop after this move number (default: whole record)")
    p.add_argument("--quantum", action="store_true",
                   help="print the quantum-state expression instead of a diagram")
    p.set_defaults(func=_cmd_state)

    p = sub.add_parser("experiment", help="seeded self-play batch, CSV out")
    p.add_argument("--config", type=Path, required=True,
                   help="JSON file of experiment settings")
    p.add_argument("--out", type=Path, default=None,
                   help="write CSV here instead of stdout")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("serve", help="run the session server")
    p.add_argument("--addr", default="127.0.0.1:8765",
                   help="host:port (QGO_LISTEN overrides)")
    p.add_argument("--web", action="store_true",
                   help="WebSocket/HTTP transport instead of framed TCP")
    p.add_argument("--static", type=Path, default=None,
                   help="directory of web client files to serve (web mode)")
    p.add_argument("--journal", type=Path, default=Path("qgo-sessions"),
                   help="session journal directory")
    p.add_argument("--no-journal", action="store_true")
    p.add_argument("--choice-timeout", type=float, default=None,
                   help="seconds before an unanswered choice abandons the game")
    p.set_defaults(func=_cmd_serve)
    return parser


# -- replay -------------------------------------------------------------------


def _load_record(path: Path) -> GameRecord:
    try:
        return parse_record(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise QuantumGoError(f"cannot read {path}: {exc}") from exc


def _cmd_replay(args: argparse.Namespace) -> int:
    record = _load_record(args.file)
    state = initial_state(record)
    try:
        for entry, state, events in replay_steps(record):
            if args.diagrams and events:
                print(f"move {entry.number} ({entry.color.value}):")
                print(render_ascii(state.board))
    except ReplayDivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(render_ascii(state.board), end="")
    print(f"status: {state.status} after {state.move_number} moves")
    if args.verify:
        result, _final = result_of(record, state)
        print(result if result is not None else "unfinished")
    return 0


# -- state --------------------------------------------------------------------


def _cmd_state(args: argparse.Namespace) -> int:
    record = _load_record(args.file)
    try:
        rr = replay(record, through=args.at)
    except ReplayDivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.quantum:
        print(state_expression(rr.board).render())
    else:
        print(render_ascii(rr.board), end="")
    return 0


# -- experiment ---------------------------------------------------------------


def _cmd_experiment(args: argparse.Namespace) -> int:
    try:
        raw = json.loads(args.config.read_text(encoding="utf-8"))
        cfg = config_from_dict(raw)
    except OSError as exc:
        raise QuantumGoError(f"cannot read {args.config}: {exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise QuantumGoError(f"bad config: {exc}") from exc
    summary = run_experiment(cfg)
    csv = summary_csv(summary)
    if args.out:
        args.out.write_text(csv, encoding="utf-8")
    else:
        sys.stdout.write(csv)
    return 0


# -- serve --------------------------------------------------------------------


def _cmd_serve(args: argparse.Namespace) -> int:
    journal = None if args.no_journal else args.journal
    if args.web:
        from . import webapp
        webapp.run(args.addr, static_dir=args.static, journal_dir=journal,
                   choice_timeout=args.choice_timeout)
    else:
        from . import server
        timeout = (server.DEFAULT_CHOICE_TIMEOUT
                   if args.choice_timeout is None else args.choice_timeout)
        server.serve(args.addr, journal_dir=journal, choice_timeout=timeout)
    return 0


# -- play ---------------------------------------------------------------------


class _HumanChoices:
    """Collapse decisions typed at the terminal."""

    def answer(self, request: ChoiceRequest) -> Coord:
        a, b = request.options
        what = "your pair" if request.step == 3 else f"pair {request.pair_id}"
        while True:
            if request.forced:
                allowed = "/".join(str(c) for c in request.forced)
                raw = input(f"{request.chooser.value}: keep which of {what}? "
                            f"(forced: {allowed}) ")
            else:
                raw = input(f"{request.chooser.value}: keep which of {what}, "
                            f"{a} or {b}? ")
            try:
                coord = Coord.parse(raw.strip())
            except InvalidCoordinateError as exc:
                print(f"  {exc}")
                continue
            if coord not in request.allowed:
                print(f"  {coord} is not among the allowed answers")
                continue
            return coord


class _PlayRouter:
    def __init__(self, by_color: Dict[Color, object]):
        self.by_color = by_color

    def answer(self, request: ChoiceRequest) -> Coord:
        return self.by_color[request.chooser].answer(request)


def _parse_human_move(raw: str) -> Move:
    raw = raw.strip()
    low = raw.lower()
    if low in ("pass", "p"):
        return Pass()
    if low in ("resign", "r"):
        return Resign()
    parts = raw.split()
    if len(parts) == 1:
        return PlaceSingle(Coord.parse(parts[0]))
    if len(parts) == 2:
        return PlacePair(Coord.parse(parts[0]), Coord.parse(parts[1]))
    raise InvalidCoordinateError(f"cannot read a move from {raw!r}")


def _prompt_human_move(state: GameState, router: _PlayRouter):
    mover = state.to_move
    number = state.move_number + 1
    print(render_ascii(state.board), end="")
    shapes = ("two points for a pair, one for a single"
              if state.ruleset.kind in ("symmetric", "semiquantum")
              else "two points, e.g. D3 C2")
    while True:
        raw = input(f"{mover.value} move {number} ({shapes}; pass/resign): ")
        try:
            move = _parse_human_move(raw)
        except InvalidCoordinateError as exc:
            print(f"  {exc}")
            continue
        try:
            return move, apply_move(state, move, router)
        except IllegalMoveError as exc:
            print(f"  illegal: {exc.detail} ({exc.code})")


def _sample_random_move(state: GameState, rng: random.Random,
                        router: _PlayRouter, attempts: int, prescreen: bool):
    """Uniform candidate sampling as in the experiment harness; with a human
    at the table, candidates that no resolution could legalize are screened
    out first so the human is only consulted about moves that commit."""
    board = state.board
    size = board.size
    rs = state.ruleset
    pairs = (rs.kind in ("standard", "weak")
             or (rs.kind == "semiquantum" and state.to_move is rs.entangled_player))
    sym_cands: Optional[List[Tuple[int, int]]] = None
    if rs.kind == "symmetric":
        last = size * size - 1
        cells = board._cells
        sym_cands = []
        for i in board.empty_indices():
            s = last - i
            if i < s and not cells[s]:
                sym_cands.append((i, s))
            elif i == s or cells[s]:
                sym_cands.append((i, -1))
    empties = board.empty_indices()
    n = len(empties)
    for _ in range(attempts):
        if sym_cands is not None:
            if not sym_cands:
                return None
            ia, ib = sym_cands[int(rng.random() * len(sym_cands))]
            a = Coord(ia // size, ia % size)
            move: Move = (PlaceSingle(a) if ib < 0
                          else PlacePair(a, Coord(ib // size, ib % size)))
        elif pairs:
            if n < 2:
                return None
            si = int(rng.random() * n)
            sj = int(rng.random() * (n - 1))
            if sj >= si:
                sj += 1
            ia, ib = empties[si], empties[sj]
            if ib < ia:
                ia, ib = ib, ia
            move = PlacePair(Coord(ia // size, ia % size),
                             Coord(ib // size, ib % size))
        else:
            if n == 0:
                return None
            i = empties[int(rng.random() * n)]
            move = PlaceSingle(Coord(i // size, i % size))
        if prescreen and not resolution_exists(state, move):
            continue
        try:
            return move, apply_move(state, move, router)
        except IllegalMoveError:
            continue
    return None


def _cmd_play(args: argparse.Namespace) -> int:
    ruleset = Ruleset.from_tag(args.variant)
    handicap = tuple(Coord.parse(p) for p in args.handicap.split(",") if p)
    state = GameState.new(args.size, args.komi, ruleset, handicap=handicap)
    specs = {Color.BLACK: args.seat_black, Color.WHITE: args.seat_white}
    interactive = "human" in specs.values()

    first = state.to_move
    rngs: Dict[Color, random.Random] = {}
    providers: Dict[Color, object] = {}
    for color, stream in ((first, "first"), (first.opponent, "second")):
        if specs[color] == "random":
            rng = random.Random(f"{args.seed}:0:{stream}")
            rngs[color] = rng
            providers[color] = RandomChoices(rng)
        else:
            providers[color] = _HumanChoices()
    router = _PlayRouter(providers)

    cap = args.max_moves if args.max_moves is not None else 4 * args.size ** 2
    kept_by_pair: Dict[int, Coord] = {}
    induced: List[int] = []
    moves: List[Tuple[Color, int, Move]] = []

    while state.status == ONGOING:
        mover = state.to_move
        number = state.move_number + 1
        if specs[mover] == "human":
            move, applied = _prompt_human_move(state, router)
        elif state.move_number >= cap:
            move = Pass()
            applied = apply_move(state, move, router)
        else:
            picked = _sample_random_move(state, rngs[mover], router,
                                         attempts=32, prescreen=interactive)
            if picked is None:
                move = Pass()
                applied = apply_move(state, move, router)
            else:
                move, applied = picked
        state, events, removed = applied
        moves.append((mover, number, move))
        for ev in events:
            kept_by_pair[ev.pair_id] = ev.kept
        if any(ev.step in (1, 2) for ev in events):
            induced.append(number)
        if interactive and specs[mover] != "human":
            desc = _describe_move(move)
            print(f"{mover.value} move {number}: {desc}")
            for ev in events:
                print(f"  pair {ev.pair_id} collapsed to {ev.kept}"
                      f" (step {ev.step})")
            for c in removed:
                print(f"  captured {c}")

    if state.winner_by_resignation is not None:
        result = resignation_string(state.winner_by_resignation)
    else:
        if state.board.pairs:
            state, events = finalize_pairs(state, router, router)
            for ev in events:
                kept_by_pair[ev.pair_id] = ev.kept
        result = score(state).result_string()

    entries = tuple(entry_for(c, n, m, kept_by_pair) for c, n, m in moves)
    record = GameRecord(args.size, args.komi, ruleset.tag, handicap, entries)
    args.out.write_text(serialize_record(record, tuple(induced)),
                        encoding="utf-8")
    if interactive:
        print(render_ascii(state.board), end="")
    print(result)
    print(f"record written to {args.out}")
    return 0


def _describe_move(move: Move) -> str:
    if isinstance(move, PlacePair):
        return f"pair {move.a} {move.b}"
    if isinstance(move, PlaceSingle):
        return f"single {move.point}"
    if isinstance(move, Pass):
        return "pass"
    return "resign"


if __name__ == "__main__":
    sys.exit(main())
