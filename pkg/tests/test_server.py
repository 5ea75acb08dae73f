"""Session server: wire codec, protocol flows, journaling, TCP transport.

Most tests drive a SessionManager directly through in-process fake clients;
moves resolve on the session worker thread, so the helpers below wait on
queues rather than poking at internals.
"""

import queue
import socket
import struct
import time
from pathlib import Path
from types import SimpleNamespace

import pytest

from qugo.board import Color, Coord
from qugo.record import PairBody, entry_move, parse_record, replay_steps
from qugo.rules import Pass, PlacePair, PlaceSingle, Resign
from qugo.server import (Server, SessionManager, encode_frame, hash_hex,
                         move_from_json, move_to_json, parse_addr, read_frame)

FIXTURES = Path(__file__).parent / "fixtures"

C = Coord.parse

WAIT = 20.0  # generous; everything here settles in milliseconds


class FakeClient:
    """In-process protocol client.  Keeps every message ever received and
    mirrors them onto an optional shared bus for cross-client ordering."""

    def __init__(self, name, bus=None):
        self.name = name
        self.messages = []
        self._queue = queue.Queue()
        self._bus = bus

    def send(self, msg):
        self.messages.append(msg)
        self._queue.put(msg)
        # errors are asserted per client; the bus carries the shared flow
        if self._bus is not None and msg["type"] != "error":
            self._bus.put((self.name, msg))

    def expect(self, mtype, timeout=WAIT):
        """Next message of the given type; unrelated ones are passed over."""
        deadline = time.monotonic() + timeout
        while True:
            left = deadline - time.monotonic()
            if left <= 0:
                raise AssertionError(
                    f"{self.name} never got {mtype!r}; saw "
                    f"{[m['type'] for m in self.messages]}")
            try:
                msg = self._queue.get(timeout=left)
            except queue.Empty:
                continue
            if msg["type"] == mtype:
                return msg

    def expect_sync(self, phase, number=None, timeout=WAIT):
        deadline = time.monotonic() + timeout
        while True:
            msg = self.expect("state_sync", max(0.01, deadline - time.monotonic()))
            if msg["phase"] == phase and (number is None
                                          or msg["move_number"] == number):
                return msg


def fresh_game(manager, size=5, komi=0.0, **config):
    """Create a session with black and white seated and a shared bus."""
    bus = queue.Queue()
    black = FakeClient("alice", bus)
    white = FakeClient("bob", bus)
    manager.handle(black, {"type": "create_game", "size": size,
                           "komi": komi, **config})
    snap = black.expect("state_sync")
    sid = snap["session"]
    manager.handle(white, {"type": "join", "session": sid, "seat": "W"})
    wsnap = white.expect("state_sync")
    return SimpleNamespace(
        sid=sid, black=black, white=white, bus=bus,
        seats={"B": black, "W": white},
        black_token=snap["you"]["token"], white_token=wsnap["you"]["token"])


def settle(manager, game, kept, number):
    """Answer collapse prompts out of `kept` until move `number` commits;
    returns its state_sync."""
    deadline = time.monotonic() + WAIT
    while True:
        left = deadline - time.monotonic()
        assert left > 0, f"move {number} never committed"
        try:
            _, msg = game.bus.get(timeout=left)
        except queue.Empty:
            continue
        mtype = msg["type"]
        if mtype == "choice_prompt":
            point = kept.get(msg["pair"])
            # prompts a test answered by hand linger on the bus; skip them
            if point is not None:
                manager.handle(game.seats[msg["chooser"]],
                               {"type": "choice_made", "session": game.sid,
                                "point": str(point)})
        elif (mtype == "state_sync" and msg["phase"] == "move"
              and msg["move_number"] == number):
            return msg


def kept_markers(record):
    return {e.number: e.body.kept for e in record.entries
            if isinstance(e.body, PairBody)}


# -- wire codec ---------------------------------------------------------------


def test_frames_round_trip_over_a_socket_pair():
    left, right = socket.socketpair()
    msgs = [{"type": "hello"},
            {"type": "chat", "text": "héllo ↯"},
            {"type": "numbers", "n": [1, 2, 3], "empty": None}]
    left.sendall(b"".join(encode_frame(m) for m in msgs))
    assert [read_frame(right) for _ in msgs] == msgs
    left.sendall(encode_frame({"type": "torn"})[:3])
    left.close()
    assert read_frame(right) is None  # mid-frame EOF reads as clean close
    right.close()


def test_frame_header_is_a_big_endian_length():
    frame = encode_frame({"a": 1})
    assert frame[:4] == struct.pack(">I", len(frame) - 4)
    assert frame[4:] == b'{"a":1}'


@pytest.mark.parametrize("move", [
    PlacePair(C("A1"), C("T19")),
    PlaceSingle(C("C3")),
    Pass(),
    Resign(),
])
def test_move_json_round_trips(move):
    assert move_from_json(move_to_json(move)) == move


def test_unknown_move_kind_is_rejected():
    with pytest.raises(ValueError):
        move_from_json({"kind": "teleport"})


def test_board_json_lists_stones_pairs_and_captures():
    manager = SessionManager()
    game = fresh_game(manager, size=9)
    manager.handle(game.black, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "C3", "b": "G7"}})
    sync = settle(manager, game, {}, 1)
    board = sync["board"]
    assert board["size"] == 9
    assert board["captures"] == {"B": 0, "W": 0}
    stones = {s["point"]: (s["color"], s["pair"]) for s in board["stones"]}
    assert stones == {"C3": ("B", 1), "G7": ("B", 1)}


# -- session lifecycle --------------------------------------------------------


def test_hello_identifies_the_server():
    manager = SessionManager()
    client = FakeClient("curious")
    manager.handle(client, {"type": "hello"})
    assert client.messages == [
        {"type": "hello", "server": "qugo", "protocol": 1}]


def test_create_game_seats_the_creator_and_sends_a_snapshot():
    manager = SessionManager()
    client = FakeClient("alice")
    manager.handle(client, {"type": "create_game", "size": 6, "komi": 0})
    snap = client.expect("state_sync")
    assert snap["phase"] == "snapshot"
    assert snap["move_number"] == 0
    assert snap["to_move"] == "B"
    assert snap["status"] == "ongoing"
    assert snap["board"]["stones"] == []
    assert snap["you"]["seat"] == "B"
    assert isinstance(snap["you"]["token"], str) and snap["you"]["token"]
    assert len(snap["position_hash"]) == 16
    int(snap["position_hash"], 16)


def test_spectators_get_a_snapshot_but_no_seat():
    manager = SessionManager()
    game = fresh_game(manager)
    carol = FakeClient("carol")
    manager.handle(carol, {"type": "join", "session": game.sid})
    snap = carol.expect("state_sync")
    assert snap["you"] == {"seat": None, "token": None}


def test_a_taken_seat_needs_its_reattach_token():
    manager = SessionManager()
    game = fresh_game(manager)
    intruder = FakeClient("mallory")
    manager.handle(intruder, {"type": "join", "session": game.sid, "seat": "B"})
    err = intruder.expect("error")
    assert err["code"] == "seat_taken"

    returning = FakeClient("alice-later")
    manager.handle(returning, {"type": "join", "session": game.sid,
                               "seat": "B", "token": game.black_token})
    snap = returning.expect("state_sync")
    assert snap["you"] == {"seat": "B", "token": game.black_token}


def test_unknown_sessions_and_message_types_are_refused():
    manager = SessionManager()
    client = FakeClient("lost")
    manager.handle(client, {"type": "move_placed", "session": "nope",
                            "move": {"kind": "pass"}})
    assert client.expect("error")["code"] == "no_such_session"
    manager.handle(client, {"type": "launch_missiles"})
    assert client.expect("error")["code"] == "bad_message"


def test_malformed_payloads_never_kill_the_connection():
    manager = SessionManager()
    game = fresh_game(manager)
    manager.handle(game.black, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "ZZ9", "b": "A1"}})
    assert game.black.expect("error")["code"] == "bad_message"
    manager.handle(game.black, {"type": "move_placed", "session": game.sid})
    assert game.black.expect("error")["code"] == "bad_message"
    manager.handle(game.black, {"type": "choice_made", "session": game.sid,
                                "point": "99Z"})
    assert game.black.expect("error")["code"] == "bad_message"
    # the session is still healthy afterwards
    manager.handle(game.black, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "B2", "b": "D4"}})
    assert settle(manager, game, {}, 1)["move_number"] == 1


def test_bad_configs_are_rejected_at_create():
    manager = SessionManager()
    for bad in [{"size": 99}, {"variant": "turbo"}, {"size": "huge"},
                {"handicap": ["Z9"]}, {"handicap": ["ZZ9"]}]:
        client = FakeClient("hopeful")
        manager.handle(client, {"type": "create_game", "komi": 0, **bad})
        assert client.expect("error")["code"] == "bad_config", bad
    assert manager.sessions == {}


# -- turn and choice policing -------------------------------------------------


def test_only_the_seat_to_move_may_place():
    manager = SessionManager()
    game = fresh_game(manager)
    spect = FakeClient("carol")
    manager.handle(spect, {"type": "join", "session": game.sid})
    spect.expect("state_sync")

    move = {"kind": "pair", "a": "B2", "b": "D4"}
    manager.handle(game.white, {"type": "move_placed", "session": game.sid,
                                "move": move})
    assert game.white.expect("error")["code"] == "not_your_turn"
    manager.handle(spect, {"type": "move_placed", "session": game.sid,
                           "move": move})
    assert spect.expect("error")["code"] == "not_your_turn"
    manager.handle(game.black, {"type": "move_placed", "session": game.sid,
                                "move": move})
    settle(manager, game, {}, 1)


def test_a_second_move_while_one_is_unresolved_is_refused():
    manager = SessionManager()
    game = fresh_game(manager)
    manager.handle(game.black, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "B2", "b": "D4"}})
    settle(manager, game, {}, 1)
    manager.handle(game.white, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "B1", "b": "E5"}})
    game.black.expect("choice_prompt")
    manager.handle(game.white, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pass"}})
    assert game.white.expect("error")["code"] == "not_your_turn"
    manager.handle(game.black, {"type": "choice_made", "session": game.sid,
                                "point": "D4"})
    settle(manager, game, {2: C("E5")}, 2)


def test_illegal_moves_carry_the_engine_code_and_leave_state_alone():
    manager = SessionManager()
    game = fresh_game(manager)
    manager.handle(game.black, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "A1", "b": "E5"}})
    settle(manager, game, {}, 1)
    manager.handle(game.white, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "A1", "b": "C3"}})
    err = game.white.expect("error")
    assert err["code"] == "illegal_move"
    assert err["detail"].startswith("occupied")
    # same seat may try again at once
    manager.handle(game.white, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "B4", "b": "D2"}})
    sync = settle(manager, game, {}, 2)
    assert sync["move_number"] == 2
    assert len(sync["board"]["stones"]) == 4
    # the rejected attempt broadcast nothing
    phases = [m["phase"] for m in game.black.messages
              if m["type"] == "state_sync"]
    assert phases == ["snapshot", "move", "move"]


def test_choices_are_policed_for_seat_and_option():
    manager = SessionManager()
    game = fresh_game(manager)
    spect = FakeClient("carol")
    manager.handle(spect, {"type": "join", "session": game.sid})
    spect.expect("state_sync")

    manager.handle(game.black, {"type": "choice_made", "session": game.sid,
                                "point": "A1"})
    assert game.black.expect("error")["code"] == "not_your_choice"

    manager.handle(game.black, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "B2", "b": "D4"}})
    settle(manager, game, {}, 1)
    manager.handle(game.white, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "B1", "b": "E5"}})
    prompt = game.black.expect("choice_prompt")
    assert prompt["chooser"] == "B"
    for wrong, code in [(game.white, "not_your_choice"),
                        (spect, "not_your_choice")]:
        manager.handle(wrong, {"type": "choice_made", "session": game.sid,
                               "point": "B2"})
        assert wrong.expect("error")["code"] == code
    manager.handle(game.black, {"type": "choice_made", "session": game.sid,
                                "point": "C3"})
    assert game.black.expect("error")["code"] == "protocol_violation"
    manager.handle(game.black, {"type": "choice_made", "session": game.sid,
                                "point": "D4"})
    settle(manager, game, {2: C("E5")}, 2)


# -- collapse flow ------------------------------------------------------------


def test_contact_placement_prompts_in_order_and_forces_step_three():
    manager = SessionManager()
    game = fresh_game(manager, size=9)
    spect = FakeClient("carol")
    manager.handle(spect, {"type": "join", "session": game.sid})
    spect.expect("state_sync")

    manager.handle(game.black, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "D3", "b": "C5"}})
    first = settle(manager, game, {}, 1)
    assert first["events"] == []

    manager.handle(game.white, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "D2", "b": "E6"}})
    prompt = game.black.expect("choice_prompt")
    assert prompt["pair"] == 1
    assert prompt["step"] == 2
    assert prompt["chooser"] == "B"
    assert set(prompt["options"]) == {"D3", "C5"}
    assert prompt["forced"] is None
    manager.handle(game.black, {"type": "choice_made", "session": game.sid,
                                "point": "D3"})

    forced = game.white.expect("choice_prompt")
    assert forced["pair"] == 2
    assert forced["step"] == 3
    assert forced["chooser"] == "W"
    assert forced["forced"] == ["D2"]
    manager.handle(game.white, {"type": "choice_made", "session": game.sid,
                                "point": "E6"})
    assert game.white.expect("error")["code"] == "protocol_violation"
    manager.handle(game.white, {"type": "choice_made", "session": game.sid,
                                "point": "D2"})
    final = spect.expect_sync("move", 2)

    phases = [m["phase"] for m in spect.messages if m["type"] == "state_sync"]
    assert phases == ["snapshot", "move", "collapse", "collapse", "move"]
    collapses = [m for m in spect.messages
                 if m["type"] == "state_sync" and m["phase"] == "collapse"]
    assert [len(m["events"]) for m in collapses] == [1, 1]
    assert all(m["position_hash"] is None for m in collapses)
    assert all(m["move_number"] == 2 and m["moved_by"] == "W"
               for m in collapses)
    assert collapses[0]["events"][0] == {
        "step": 2, "pair": 1, "kept": "D3", "removed": "C5", "chooser": "B"}
    assert collapses[1]["events"][0] == {
        "step": 3, "pair": 2, "kept": "D2", "removed": "E6", "chooser": "W"}

    stones = {s["point"]: (s["color"], s["pair"])
              for s in final["board"]["stones"]}
    assert stones == {"D3": ("B", None), "D2": ("W", None)}
    assert [e["pair"] for e in final["events"]] == [1, 2]
    assert final["removed"] == []
    assert final["last_move"] == {"kind": "pair", "a": "D2", "b": "E6"}
    assert final["moved_by"] == "W"


def test_reattaching_mid_choice_resends_the_pending_prompt():
    manager = SessionManager()
    game = fresh_game(manager)
    manager.handle(game.black, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "B2", "b": "D4"}})
    settle(manager, game, {}, 1)
    manager.handle(game.white, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "B1", "b": "E5"}})
    game.black.expect("choice_prompt")
    manager.detach(game.black)

    back = FakeClient("alice-again", game.bus)
    manager.handle(back, {"type": "join", "session": game.sid, "seat": "B",
                          "token": game.black_token})
    snap = back.expect("state_sync")
    assert snap["phase"] == "snapshot"
    again = back.expect("choice_prompt")
    assert again["pair"] == 1
    assert set(again["options"]) == {"B2", "D4"}
    manager.handle(back, {"type": "choice_made", "session": game.sid,
                          "point": "B2"})
    # keeping the touching half forces white onto it
    forced = game.white.expect("choice_prompt")
    assert forced["forced"] == ["B1"]
    manager.handle(game.white, {"type": "choice_made", "session": game.sid,
                                "point": "B1"})
    final = back.expect_sync("move", 2)
    stones = {s["point"]: s["color"] for s in final["board"]["stones"]}
    assert stones == {"B2": "B", "B1": "W"}


# -- endings ------------------------------------------------------------------


def test_resignation_closes_the_game_at_once():
    manager = SessionManager()
    game = fresh_game(manager)
    manager.handle(game.black, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "resign"}})
    sync = game.white.expect_sync("move", 1)
    assert sync["status"] == "finished"
    over = game.white.expect("game_over")
    assert over == {"type": "game_over", "session": game.sid,
                    "result": "W+R", "reason": "resignation", "score": None}
    manager.handle(game.white, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pass"}})
    err = game.white.expect("error")
    assert err["code"] == "illegal_move"
    assert err["detail"] == "game_over"


def test_an_unanswered_choice_abandons_the_game():
    manager = SessionManager(choice_timeout=0.05)
    game = fresh_game(manager)
    manager.handle(game.black, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "B2", "b": "D4"}})
    settle(manager, game, {}, 1)
    manager.handle(game.white, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "B1", "b": "E5"}})
    game.black.expect("choice_prompt")  # deliberately never answered
    over = game.black.expect("game_over")
    assert over["result"] is None
    assert over["reason"] == "choice_timeout"
    assert game.white.expect("game_over")["reason"] == "choice_timeout"
    manager.handle(game.black, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pass"}})
    assert game.black.expect("error")["detail"] == "game_over"


def test_quantum_state_reports_the_live_expression():
    manager = SessionManager()
    game = fresh_game(manager, size=3)
    manager.handle(game.black, {"type": "move_placed", "session": game.sid,
                                "move": {"kind": "pair", "a": "A2", "b": "B1"}})
    settle(manager, game, {}, 1)
    manager.handle(game.white, {"type": "quantum_state", "session": game.sid})
    reply = game.white.expect("quantum_state")
    assert reply["session"] == game.sid
    assert reply["expression"] == (
        "(|0>_{A1,A3,B2,B3,C1,C2,C3})"
        " (a1|0>_{A2}|1>_{B1} - b1|1>_{A2}|0>_{B1})_B")


# -- a complete game over the protocol ----------------------------------------


def test_replaying_a_recorded_game_matches_the_engine_hash_for_hash():
    record = parse_record((FIXTURES / "game1_6x6.qgr").read_text())
    kept = kept_markers(record)
    engine_hashes = [hash_hex(state.board)
                     for _, state, _ in replay_steps(record)]

    manager = SessionManager()
    game = fresh_game(manager, size=6, komi=0.0)
    seen = []
    sync = None
    for entry in record.entries:
        mover = game.seats[entry.color.value]
        manager.handle(mover, {"type": "move_placed", "session": game.sid,
                               "move": move_to_json(entry_move(entry))})
        sync = settle(manager, game, kept, entry.number)
        seen.append(sync["position_hash"])
    assert seen == engine_hashes

    assert sync["status"] == "finished"
    assert sync["board"]["captures"] == {"B": 1, "W": 3}
    over = game.black.expect("game_over")
    assert over["result"] == "B+4"
    assert over["reason"] == "scored"
    assert over["score"]["margin"] == 4.0
    assert over["score"]["winner"] == "B"

    exported = parse_record(manager.export_record(game.sid))
    assert len(exported.entries) == 30
    replayed = [hash_hex(state.board)
                for _, state, _ in replay_steps(exported)]
    assert replayed == engine_hashes


# -- journaling and recovery --------------------------------------------------


def test_a_recovered_session_resumes_where_the_journal_ends(tmp_path):
    record = parse_record((FIXTURES / "game1_6x6.qgr").read_text())
    kept = kept_markers(record)
    first = SessionManager(journal_dir=tmp_path)
    game = fresh_game(first, size=6, komi=0.0)
    sync = None
    for entry in record.entries[:12]:
        mover = game.seats[entry.color.value]
        first.handle(mover, {"type": "move_placed", "session": game.sid,
                             "move": move_to_json(entry_move(entry))})
        sync = settle(first, game, kept, entry.number)
    parked_hash = sync["position_hash"]

    second = SessionManager(journal_dir=tmp_path)
    assert game.sid in second.sessions
    assert hash_hex(second.sessions[game.sid].state.board) == parked_hash

    bus = queue.Queue()
    black = FakeClient("alice-later", bus)
    white = FakeClient("bob-later", bus)
    stale = FakeClient("mallory")
    second.handle(stale, {"type": "join", "session": game.sid, "seat": "B",
                          "token": "forged"})
    assert stale.expect("error")["code"] == "seat_taken"
    second.handle(black, {"type": "join", "session": game.sid, "seat": "B",
                          "token": game.black_token})
    snap = black.expect("state_sync")
    assert snap["position_hash"] == parked_hash
    assert snap["move_number"] == 12
    second.handle(white, {"type": "join", "session": game.sid, "seat": "W",
                          "token": game.white_token})
    white.expect("state_sync")

    resumed = SimpleNamespace(sid=game.sid, bus=bus,
                              seats={"B": black, "W": white})
    entry = record.entries[12]
    second.handle(resumed.seats[entry.color.value],
                  {"type": "move_placed", "session": game.sid,
                   "move": move_to_json(entry_move(entry))})
    sync = settle(second, resumed, kept, 13)
    engine = [hash_hex(state.board)
              for _, state, _ in replay_steps(record, through=13)]
    assert sync["position_hash"] == engine[-1]


def test_recovery_skips_torn_and_foreign_journal_files(tmp_path):
    (tmp_path / "torn.qgrj").write_text("{never finished\n", encoding="utf-8")
    (tmp_path / "foreign.qgrj").write_text('{"something":"else"}\n',
                                           encoding="utf-8")
    first = SessionManager(journal_dir=tmp_path)
    game = fresh_game(first)
    manager = SessionManager(journal_dir=tmp_path)
    assert set(manager.sessions) == {game.sid}


# -- TCP transport ------------------------------------------------------------


def read_until(sock, mtype):
    while True:
        msg = read_frame(sock)
        assert msg is not None, f"connection closed while awaiting {mtype!r}"
        if msg["type"] == mtype:
            return msg


def read_move_sync(sock, number):
    while True:
        msg = read_until(sock, "state_sync")
        if msg["phase"] == "move" and msg["move_number"] == number:
            return msg


def send_msg(sock, msg):
    sock.sendall(encode_frame(msg))


def test_tcp_clients_play_a_forced_collapse_end_to_end():
    server = Server("127.0.0.1:0")
    server.start()
    try:
        alice = socket.create_connection(parse_addr(server.addr), timeout=WAIT)
        bob = socket.create_connection(parse_addr(server.addr), timeout=WAIT)
        alice.settimeout(WAIT)
        bob.settimeout(WAIT)

        send_msg(alice, {"type": "hello"})
        assert read_frame(alice) == {"type": "hello", "server": "qugo",
                                     "protocol": 1}
        send_msg(alice, {"type": "create_game", "size": 5, "komi": 0})
        snap = read_until(alice, "state_sync")
        sid = snap["session"]
        assert snap["you"]["seat"] == "B"

        send_msg(bob, {"type": "join", "session": sid, "seat": "W"})
        assert read_until(bob, "state_sync")["you"]["seat"] == "W"

        send_msg(alice, {"type": "move_placed", "session": sid,
                         "move": {"kind": "pair", "a": "B2", "b": "D4"}})
        first_a = read_move_sync(alice, 1)
        first_b = read_move_sync(bob, 1)
        assert first_a["position_hash"] == first_b["position_hash"]

        send_msg(bob, {"type": "move_placed", "session": sid,
                       "move": {"kind": "pair", "a": "B1", "b": "E5"}})
        prompt = read_until(alice, "choice_prompt")
        assert prompt["chooser"] == "B" and prompt["forced"] is None
        send_msg(alice, {"type": "choice_made", "session": sid, "point": "B2"})
        forced = read_until(bob, "choice_prompt")
        assert forced["forced"] == ["B1"]
        send_msg(bob, {"type": "choice_made", "session": sid, "point": "B1"})

        final_a = read_move_sync(alice, 2)
        final_b = read_move_sync(bob, 2)
        assert final_a["position_hash"] == final_b["position_hash"]
        stones = {s["point"]: s["color"] for s in final_a["board"]["stones"]}
        assert stones == {"B2": "B", "B1": "W"}
        alice.close()
        bob.close()
    finally:
        server.close()


def test_parse_addr_defaults_to_loopback():
    assert parse_addr("9000") == ("127.0.0.1", 9000)
    assert parse_addr("0.0.0.0:7777") == ("0.0.0.0", 7777)
