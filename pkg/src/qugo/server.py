"""Turn-based session server.

A transport-agnostic SessionManager owns every game session and talks to
abstract clients (anything with a ``send(dict)`` method); a threaded TCP
front end speaks the wire format: frames of a 4-byte big-endian length
followed by one UTF-8 JSON object with a ``type`` field.

Each session is one logical state machine.  Client messages are validated
on the reader thread, but moves run on a per-session worker thread because
resolving a move can block for minutes (or days) waiting for collapse
choices, and the answer may come from the very connection that sent the
move.  At most one choice is pending per session at any time.
"""

from __future__ import annotations

import json
import os
import queue
import secrets
import socket
import struct
import threading
import uuid
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Protocol, Tuple

from .board import BoardState, Color, Coord
from .errors import IllegalMoveError, InvalidCoordinateError, QuantumGoError
from .qstate import state_expression
from .record import GameRecord, entry_for, serialize_record
from .rules import (ChoiceRequest, CollapseEvent, FINISHED, GameState, Move,
                    Pass, PlacePair, PlaceSingle, Resign, Ruleset, apply_move,
                    position_hash)
from .scoring import ScoreResult, finalize_pairs, resignation_string, score

PROTOCOL_VERSION = 1
DEFAULT_CHOICE_TIMEOUT = 7 * 24 * 3600.0  # abandon, never auto-choose


# -- wire codec ---------------------------------------------------------------


def encode_frame(msg: dict) -> bytes:
    data = json.dumps(msg, separators=(",", ":"), sort_keys=True).encode("utf-8")
    return struct.pack(">I", len(data)) + data


def read_frame(sock: socket.socket) -> Optional[dict]:
    """One framed JSON object off a blocking socket; None on clean EOF."""
    header = _read_exact(sock, 4)
    if header is None:
        return None
    (length,) = struct.unpack(">I", header)
    body = _read_exact(sock, length)
    if body is None:
        return None
    return json.loads(body.decode("utf-8"))


def _read_exact(sock: socket.socket, n: int) -> Optional[bytes]:
    chunks = b""
    while len(chunks) < n:
        part = sock.recv(n - len(chunks))
        if not part:
            return None
        chunks += part
    return chunks


def move_to_json(move: Move) -> dict:
    if isinstance(move, PlacePair):
        return {"kind": "pair", "a": str(move.a), "b": str(move.b)}
    if isinstance(move, PlaceSingle):
        return {"kind": "single", "point": str(move.point)}
    if isinstance(move, Pass):
        return {"kind": "pass"}
    return {"kind": "resign"}


def move_from_json(obj: dict) -> Move:
    kind = obj.get("kind")
    if kind == "pair":
        return PlacePair(Coord.parse(obj["a"]), Coord.parse(obj["b"]))
    if kind == "single":
        return PlaceSingle(Coord.parse(obj["point"]))
    if kind == "pass":
        return Pass()
    if kind == "resign":
        return Resign()
    raise ValueError(f"unknown move kind {kind!r}")


def event_to_json(ev: CollapseEvent) -> dict:
    return {"step": ev.step, "pair": ev.pair_id, "kept": str(ev.kept),
            "removed": str(ev.removed), "chooser": ev.chooser.value}


def prompt_to_json(req: ChoiceRequest) -> dict:
    return {"pair": req.pair_id, "chooser": req.chooser.value,
            "options": [str(c) for c in req.options],
            "forced": [str(c) for c in req.forced] if req.forced else None,
            "step": req.step}


def board_to_json(board: BoardState) -> dict:
    stones = [{"point": str(c), "color": occ.color.value, "pair": occ.pair_id}
              for c, occ in board.stones()]
    return {"size": board.size, "stones": stones,
            "captures": {"B": board.captures[Color.BLACK],
                         "W": board.captures[Color.WHITE]}}


def score_to_json(result: ScoreResult) -> dict:
    return {"black_area": result.black_area, "white_area": result.white_area,
            "dame": result.dame, "komi": result.komi,
            "winner": result.winner.value if result.winner else None,
            "margin": result.margin}


def hash_hex(board: BoardState) -> str:
    return f"{position_hash(board):016x}"


# -- sessions -----------------------------------------------------------------


class Client(Protocol):
    name: str

    def send(self, msg: dict) -> None: ...


class _MoveAbandoned(Exception):
    pass


class Seat:
    __slots__ = ("color", "participant", "token", "client")

    def __init__(self, color: Color, participant: str, token: str):
        self.color = color
        self.participant = participant
        self.token = token
        self.client: Optional[Client] = None


class Session:
    def __init__(self, session_id: str, state: GameState,
                 handicap: Tuple[Coord, ...] = ()):
        self.id = session_id
        self.state = state
        self.handicap = handicap
        self.seats: Dict[Color, Seat] = {}
        self.spectators: List[Client] = []
        self.lock = threading.RLock()
        self.pending: Optional[ChoiceRequest] = None
        self.in_flight = False
        self.cmd_queue: "queue.Queue[Optional[tuple]]" = queue.Queue()
        self.choice_queue: "queue.Queue[Coord]" = queue.Queue()
        self.worker: Optional[threading.Thread] = None
        self.moves: List[Tuple[Color, int, Move]] = []  # committed
        self.kept_by_pair: Dict[int, Coord] = {}  # from every collapse event
        self.induced: List[int] = []  # moves that collapsed other pairs
        self.result: Optional[str] = None
        self.over_reason: Optional[str] = None
        self.abandoned = False

    def record(self) -> GameRecord:
        entries = tuple(entry_for(color, n, move, self.kept_by_pair)
                        for color, n, move in self.moves)
        return GameRecord(self.state.board.size, self.state.komi,
                          self.state.ruleset.tag, self.handicap, entries)

    @property
    def over(self) -> bool:
        return self.result is not None or self.abandoned

    def seat_of(self, client: Client) -> Optional[Color]:
        for color, seat in self.seats.items():
            if seat.client is client:
                return color
        return None

    def participants(self) -> Iterable[Client]:
        for seat in self.seats.values():
            if seat.client is not None:
                yield seat.client
        yield from self.spectators


class SessionManager:
    """Owns sessions, routes protocol messages, journals committed moves.

    Thread-safe: reader threads call handle(); each session resolves moves
    on its own worker thread so a blocked choice never stalls the reader
    that must deliver the answer.
    """

    def __init__(self, journal_dir: Optional[Path] = None,
                 choice_timeout: float = DEFAULT_CHOICE_TIMEOUT):
        self.sessions: Dict[str, Session] = {}
        self.journal_dir = Path(journal_dir) if journal_dir else None
        self.choice_timeout = choice_timeout
        self._lock = threading.Lock()
        if self.journal_dir:
            self.journal_dir.mkdir(parents=True, exist_ok=True)
            self._recover()

    # -- message entry point --

    def handle(self, client: Client, msg: dict) -> None:
        try:
            mtype = msg.get("type")
            if mtype == "hello":
                client.send({"type": "hello", "server": "qugo",
                             "protocol": PROTOCOL_VERSION})
            elif mtype == "create_game":
                self._create_game(client, msg)
            elif mtype == "join":
                self._join(client, msg)
            elif mtype == "move_placed":
                self._move_placed(client, msg)
            elif mtype == "choice_made":
                self._choice_made(client, msg)
            elif mtype == "quantum_state":
                self._quantum_state(client, msg)
            else:
                self._error(client, "bad_message", f"unknown type {mtype!r}")
        except (KeyError, TypeError, ValueError, InvalidCoordinateError) as exc:
            self._error(client, "bad_message", str(exc))

    def detach(self, client: Client) -> None:
        """Forget a disconnected client; its seat survives for reattach."""
        with self._lock:
            sessions = list(self.sessions.values())
        for session in sessions:
            with session.lock:
                for seat in session.seats.values():
                    if seat.client is client:
                        seat.client = None
                if client in session.spectators:
                    session.spectators.remove(client)

    # -- handlers --

    def _create_game(self, client: Client, msg: dict) -> None:
        try:
            size = int(msg.get("size", 19))
            komi = float(msg.get("komi", 7.5))
            variant = msg.get("variant", "standard")
            handicap = tuple(Coord.parse(p) for p in msg.get("handicap", []))
            superko = msg.get("superko", "position")
            ruleset = Ruleset.from_tag(variant)
            state = GameState.new(size, komi, ruleset, handicap=handicap,
                                  superko=superko)
        except (QuantumGoError, ValueError) as exc:
            self._error(client, "bad_config", str(exc))
            return
        session = Session(uuid.uuid4().hex[:12], state, handicap)
        with self._lock:
            self.sessions[session.id] = session
        self._journal(session, {"meta": {
            "session": session.id, "size": size, "komi": komi,
            "variant": variant, "handicap": [str(c) for c in handicap],
            "superko": superko}})
        self._start_worker(session)
        seat_name = msg.get("seat", "B")
        with session.lock:
            if seat_name in ("B", "W"):
                seat = self._grant_seat(session, Color(seat_name),
                                        msg.get("participant", client.name))
                seat.client = client
                you = {"seat": seat.color.value, "token": seat.token}
            else:
                session.spectators.append(client)
                you = {"seat": None, "token": None}
            client.send(self._sync(session, phase="snapshot", you=you))

    def _join(self, client: Client, msg: dict) -> None:
        session = self._session_for(client, msg)
        if session is None:
            return
        seat_name = msg.get("seat", "spectator")
        with session.lock:
            if seat_name not in ("B", "W"):
                session.spectators.append(client)
                client.send(self._sync(session, phase="snapshot",
                                       you={"seat": None, "token": None}))
                return
            color = Color(seat_name)
            seat = session.seats.get(color)
            token = msg.get("token")
            if seat is None:
                seat = self._grant_seat(session, color,
                                        msg.get("participant", client.name))
            elif seat.token != token:
                self._error(client, "seat_taken",
                            f"seat {color.value} needs its reattach token")
                return
            seat.client = client
            client.send(self._sync(session, phase="snapshot",
                                   you={"seat": color.value, "token": seat.token}))
            pending = session.pending
            if pending is not None and pending.chooser is color:
                client.send({"type": "choice_prompt", "session": session.id,
                             **prompt_to_json(pending)})

    def _move_placed(self, client: Client, msg: dict) -> None:
        session = self._session_for(client, msg)
        if session is None:
            return
        try:
            move = move_from_json(msg["move"])
        except (KeyError, ValueError, InvalidCoordinateError) as exc:
            self._error(client, "bad_message", str(exc))
            return
        with session.lock:
            seat = session.seat_of(client)
            if session.over:
                self._error(client, "illegal_move", "game_over")
                return
            if seat is None or seat is not session.state.to_move or session.in_flight:
                self._error(client, "not_your_turn",
                            "it is not this seat's turn")
                return
            session.in_flight = True
        session.cmd_queue.put(("move", move, client))

    def _choice_made(self, client: Client, msg: dict) -> None:
        session = self._session_for(client, msg)
        if session is None:
            return
        try:
            coord = Coord.parse(msg["point"])
        except (KeyError, ValueError, InvalidCoordinateError) as exc:
            self._error(client, "bad_message", str(exc))
            return
        with session.lock:
            pending = session.pending
            seat = session.seat_of(client)
            if pending is None or seat is not pending.chooser:
                self._error(client, "not_your_choice",
                            "no choice is pending for this seat")
                return
            if coord not in pending.allowed:
                self._error(client, "protocol_violation",
                            f"{coord} is not among the allowed answers")
                return
            session.pending = None
            session.choice_queue.put(coord)

    def _quantum_state(self, client: Client, msg: dict) -> None:
        session = self._session_for(client, msg)
        if session is None:
            return
        with session.lock:
            expr = state_expression(session.state.board).render()
        client.send({"type": "quantum_state", "session": session.id,
                     "expression": expr})

    # -- move resolution (worker thread) --

    def _start_worker(self, session: Session) -> None:
        t = threading.Thread(target=self._worker, args=(session,),
                             name=f"session-{session.id}", daemon=True)
        session.worker = t
        t.start()

    def _worker(self, session: Session) -> None:
        while True:
            cmd = session.cmd_queue.get()
            if cmd is None:
                return
            _, move, client = cmd
            try:
                self._resolve_move(session, move, client)
            except _MoveAbandoned:
                self._abandon(session)
                return
            finally:
                with session.lock:
                    session.in_flight = False

    def _resolve_move(self, session: Session, move: Move, client: Client) -> None:
        mover = session.state.to_move
        number = session.state.move_number + 1
        choices: List[Coord] = []
        provider = _NetworkChoices(self, session, choices)

        def observer(ev: CollapseEvent, board: BoardState) -> None:
            self._broadcast(session, self._sync(
                session, phase="collapse", board=board, events=[ev],
                move_number=number, moved_by=mover.value))

        try:
            new_state, events, removed = apply_move(
                session.state, move, provider, observer)
        except IllegalMoveError as exc:
            self._error(client, "illegal_move", f"{exc.code}: {exc.detail}")
            return
        with session.lock:
            session.state = new_state
            session.moves.append((mover, number, move))
            for ev in events:
                session.kept_by_pair[ev.pair_id] = ev.kept
            if any(ev.step in (1, 2) for ev in events):
                session.induced.append(number)
        self._journal(session, {"move": {
            "n": number, "by": mover.value, "move": move_to_json(move),
            "choices": [str(c) for c in choices]}})
        self._broadcast(session, self._sync(
            session, phase="move", events=events, last_move=move_to_json(move),
            moved_by=mover.value, removed=[str(c) for c in removed]))
        if new_state.status == FINISHED:
            self._finish(session)

    def _finish(self, session: Session) -> None:
        state = session.state
        if state.winner_by_resignation is not None:
            result = resignation_string(state.winner_by_resignation)
            self._game_over(session, result, "resignation", None)
            return
        if state.board.pairs:
            choices: List[Coord] = []
            provider = _NetworkChoices(self, session, choices)
            state, events = finalize_pairs(state, provider, provider)
            with session.lock:
                session.state = state
                for ev in events:
                    session.kept_by_pair[ev.pair_id] = ev.kept
            self._journal(session, {"finalize": {
                "choices": [str(c) for c in choices]}})
            self._broadcast(session, self._sync(session, phase="finalize",
                                                events=events))
        result = score(session.state)
        self._game_over(session, result.result_string(), "scored", result)

    def _game_over(self, session: Session, result: str, reason: str,
                   detail: Optional[ScoreResult]) -> None:
        with session.lock:
            session.result = result
            session.over_reason = reason
        self._journal(session, {"over": {"result": result, "reason": reason}})
        msg = {"type": "game_over", "session": session.id, "result": result,
               "reason": reason,
               "score": score_to_json(detail) if detail else None}
        self._broadcast(session, msg)

    def _abandon(self, session: Session) -> None:
        with session.lock:
            session.abandoned = True
            session.pending = None
        self._journal(session, {"over": {"result": None,
                                         "reason": "choice_timeout"}})
        self._broadcast(session, {"type": "game_over", "session": session.id,
                                  "result": None, "reason": "choice_timeout",
                                  "score": None})

    # -- plumbing --

    def _grant_seat(self, session: Session, color: Color,
                    participant: str) -> Seat:
        seat = Seat(color, participant, secrets.token_hex(8))
        session.seats[color] = seat
        self._journal(session, {"seat": {
            "color": color.value, "participant": participant,
            "token": seat.token}})
        return seat

    def _session_for(self, client: Client, msg: dict) -> Optional[Session]:
        sid = msg.get("session")
        with self._lock:
            session = self.sessions.get(sid)
        if session is None:
            self._error(client, "no_such_session", f"no session {sid!r}")
        return session

    def _sync(self, session: Session, phase: str,
              board: Optional[BoardState] = None,
              events: Iterable[CollapseEvent] = (),
              move_number: Optional[int] = None,
              moved_by: Optional[str] = None,
              last_move: Optional[dict] = None,
              removed: Optional[List[str]] = None,
              you: Optional[dict] = None) -> dict:
        state = session.state
        committed = board is None
        snap = board_to_json(state.board if committed else board)
        msg = {"type": "state_sync", "session": session.id, "phase": phase,
               "move_number": state.move_number if move_number is None else move_number,
               "moved_by": moved_by, "last_move": last_move,
               "events": [event_to_json(e) for e in events],
               "removed": removed or [],
               "board": snap, "to_move": state.to_move.value,
               "status": state.status,
               "position_hash": hash_hex(state.board) if committed else None}
        if you is not None:
            msg["you"] = you
        return msg

    def _broadcast(self, session: Session, msg: dict) -> None:
        with session.lock:
            targets = list(session.participants())
        for c in targets:
            try:
                c.send(msg)
            except OSError:
                pass  # reader thread notices the dead socket

    def _error(self, client: Client, code: str, detail: str) -> None:
        client.send({"type": "error", "code": code, "detail": detail})

    # -- journaling and recovery --

    def _journal(self, session: Session, line: dict) -> None:
        if not self.journal_dir:
            return
        path = self.journal_dir / f"{session.id}.qgrj"
        with session.lock:
            with path.open("a", encoding="utf-8") as f:
                f.write(json.dumps(line, separators=(",", ":"),
                                   sort_keys=True) + "\n")

    def _recover(self) -> None:
        assert self.journal_dir is not None
        for path in sorted(self.journal_dir.glob("*.qgrj")):
            try:
                session = _recover_session(path)
            except (QuantumGoError, ValueError, KeyError, json.JSONDecodeError):
                continue  # a torn or foreign file never blocks startup
            self.sessions[session.id] = session
            self._start_worker(session)

    def export_record(self, session_id: str) -> str:
        """The session's committed moves as record text."""
        with self._lock:
            session = self.sessions[session_id]
        with session.lock:
            record = session.record()
            induced = tuple(session.induced)
        return serialize_record(record, induced)


class _NetworkChoices:
    """ChoiceProvider that prompts the choosing seat and blocks on its
    answer; a timeout abandons the move (never picks silently)."""

    def __init__(self, manager: SessionManager, session: Session,
                 log: List[Coord]):
        self.manager = manager
        self.session = session
        self.log = log

    def answer(self, request: ChoiceRequest) -> Coord:
        session = self.session
        with session.lock:
            session.pending = request
            seat = session.seats.get(request.chooser)
            target = seat.client if seat else None
        if target is not None:
            try:
                target.send({"type": "choice_prompt", "session": session.id,
                             **prompt_to_json(request)})
            except OSError:
                pass
        try:
            coord = session.choice_queue.get(
                timeout=self.manager.choice_timeout)
        except queue.Empty:
            raise _MoveAbandoned() from None
        self.log.append(coord)
        return coord


class _OrderedChoices:
    """Replays journaled answers in the order they were asked."""

    def __init__(self, coords: Iterable[Coord]):
        self._it = iter(coords)

    def answer(self, request: ChoiceRequest) -> Coord:
        return next(self._it)


def _recover_session(path: Path) -> Session:
    lines = [json.loads(l) for l in path.read_text(encoding="utf-8").splitlines()
             if l.strip()]
    meta = lines[0]["meta"]
    state = GameState.new(
        meta["size"], meta["komi"], Ruleset.from_tag(meta["variant"]),
        handicap=tuple(Coord.parse(p) for p in meta["handicap"]),
        superko=meta["superko"])
    session = Session(meta["session"], state,
                      tuple(Coord.parse(p) for p in meta["handicap"]))
    for line in lines[1:]:
        if "seat" in line:
            info = line["seat"]
            color = Color(info["color"])
            seat = Seat(color, info["participant"], info["token"])
            session.seats[color] = seat
        elif "move" in line:
            info = line["move"]
            move = move_from_json(info["move"])
            provider = _OrderedChoices(Coord.parse(p) for p in info["choices"])
            state, events, _ = apply_move(session.state, move, provider)
            session.state = state
            session.moves.append((Color(info["by"]), info["n"], move))
            for ev in events:
                session.kept_by_pair[ev.pair_id] = ev.kept
            if any(ev.step in (1, 2) for ev in events):
                session.induced.append(info["n"])
        elif "finalize" in line:
            provider = _OrderedChoices(
                Coord.parse(p) for p in line["finalize"]["choices"])
            state, events = finalize_pairs(session.state, provider, provider)
            session.state = state
            for ev in events:
                session.kept_by_pair[ev.pair_id] = ev.kept
        elif "over" in line:
            session.result = line["over"]["result"]
            session.over_reason = line["over"]["reason"]
            if session.result is None:
                session.abandoned = True
    return session


# -- TCP front end ------------------------------------------------------------


class TcpClient:
    def __init__(self, conn: socket.socket, name: str):
        self.conn = conn
        self.name = name
        self._wlock = threading.Lock()

    def send(self, msg: dict) -> None:
        data = encode_frame(msg)
        with self._wlock:
            self.conn.sendall(data)


def parse_addr(addr: str) -> Tuple[str, int]:
    host, _, port = addr.rpartition(":")
    return host or "127.0.0.1", int(port)


class Server:
    """Threaded TCP listener; one reader thread per connection."""

    def __init__(self, addr: str, manager: Optional[SessionManager] = None):
        self.manager = manager or SessionManager()
        host, port = parse_addr(addr)
        self.sock = socket.create_server((host, port))
        self.addr = f"{host}:{self.sock.getsockname()[1]}"
        self._accept_thread: Optional[threading.Thread] = None
        self._closing = False

    def start(self) -> None:
        self._accept_thread = threading.Thread(
            target=self._accept_loop, name="qgo-accept", daemon=True)
        self._accept_thread.start()

    def serve_forever(self) -> None:
        self._accept_loop()

    def close(self) -> None:
        self._closing = True
        try:
            self.sock.close()
        except OSError:
            pass

    def _accept_loop(self) -> None:
        n = 0
        while not self._closing:
            try:
                conn, peer = self.sock.accept()
            except OSError:
                return
            n += 1
            client = TcpClient(conn, f"{peer[0]}:{peer[1]}#{n}")
            threading.Thread(target=self._reader, args=(conn, client),
                             name=f"qgo-read-{n}", daemon=True).start()

    def _reader(self, conn: socket.socket, client: TcpClient) -> None:
        try:
            while True:
                try:
                    msg = read_frame(conn)
                except (OSError, json.JSONDecodeError, struct.error):
                    break
                if msg is None:
                    break
                try:
                    self.manager.handle(client, msg)
                except OSError:
                    break  # peer vanished mid-reply
        finally:
            self.manager.detach(client)
            try:
                conn.close()
            except OSError:
                pass


def serve(addr: str, journal_dir: Optional[Path] = None,
          choice_timeout: float = DEFAULT_CHOICE_TIMEOUT) -> None:
    """Run the TCP server until interrupted.  QGO_LISTEN overrides addr."""
    addr = os.environ.get("QGO_LISTEN", addr)
    manager = SessionManager(journal_dir=journal_dir,
                             choice_timeout=choice_timeout)
    server = Server(addr, manager)
    print(f"qgo server listening on {server.addr}")
    server.serve_forever()
