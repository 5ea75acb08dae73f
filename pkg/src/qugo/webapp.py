"""Browser front end: the session protocol over WebSocket, a record-replay
endpoint, and static serving for the web client.

WebSocket text frames carry the same JSON objects as the TCP transport;
the socket's own framing replaces the length prefix.  One WebSocket
connection is one protocol client.
"""

from __future__ import annotations

import asyncio
import json
import os
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .board import Color
from .errors import ParseError, ReplayDivergenceError
from .qstate import state_expression
from .record import (entry_move, initial_state, parse_record, replay_steps,
                     result_of)
from .server import (SessionManager, board_to_json, event_to_json, hash_hex,
                     move_to_json)


class WsClient:
    """Adapter handing worker-thread sends to the connection's event loop."""

    def __init__(self, name: str, loop: asyncio.AbstractEventLoop,
                 outbox: "asyncio.Queue[dict]"):
        self.name = name
        self._loop = loop
        self._outbox = outbox

    def send(self, msg: dict) -> None:
        self._loop.call_soon_threadsafe(self._outbox.put_nowait, msg)


def build_app(manager: Optional[SessionManager] = None,
              static_dir: Optional[Path] = None) -> FastAPI:
    manager = manager or SessionManager()
    app = FastAPI(title="qugo")
    app.state.manager = manager

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket) -> None:
        await websocket.accept()
        loop = asyncio.get_running_loop()
        outbox: "asyncio.Queue[dict]" = asyncio.Queue()
        peer = websocket.client
        client = WsClient(f"ws:{peer.host}:{peer.port}" if peer else "ws:?",
                          loop, outbox)

        async def pump() -> None:
            while True:
                msg = await outbox.get()
                await websocket.send_text(
                    json.dumps(msg, separators=(",", ":"), sort_keys=True))

        sender = asyncio.create_task(pump())
        try:
            while True:
                text = await websocket.receive_text()
                try:
                    msg = json.loads(text)
                except json.JSONDecodeError as exc:
                    client.send({"type": "error", "code": "bad_message",
                                 "detail": str(exc)})
                    continue
                if not isinstance(msg, dict):
                    client.send({"type": "error", "code": "bad_message",
                                 "detail": "a JSON object is required"})
                    continue
                manager.handle(client, msg)
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            manager.detach(client)

    @app.post("/api/replay")
    async def api_replay(request: Request) -> JSONResponse:
        text = (await request.body()).decode("utf-8", errors="replace")
        try:
            record = parse_record(text)
        except ParseError as exc:
            return JSONResponse({"error": {"kind": "parse", "line": exc.line,
                                           "code": exc.code,
                                           "detail": exc.detail}},
                                status_code=400)
        state = initial_state(record)
        syncs = [_replay_sync(None, state, [])]
        try:
            for entry, state, events in replay_steps(record):
                syncs.append(_replay_sync(entry, state, events))
        except ReplayDivergenceError as exc:
            return JSONResponse(
                {"error": {"kind": "divergence", "move": exc.move_number,
                           "detail": str(exc)}},
                status_code=400)
        result, final = result_of(record, state)
        return JSONResponse({
            "record": {"size": record.size, "komi": record.komi,
                       "variant": record.variant,
                       "handicap": [str(c) for c in record.handicap]},
            "result": result,
            "final_board": board_to_json(final.board),
            "syncs": syncs})

    @app.get("/api/sessions")
    async def api_sessions() -> JSONResponse:
        rows = []
        for sid, session in list(manager.sessions.items()):
            with session.lock:
                rows.append({
                    "session": sid,
                    "size": session.state.board.size,
                    "variant": session.state.ruleset.tag,
                    "status": session.state.status,
                    "result": session.result,
                    "seats": {c.value: s.participant
                              for c, s in session.seats.items()},
                    "open_seats": [x for x in ("B", "W")
                                   if Color(x) not in session.seats],
                })
        return JSONResponse({"sessions": rows})

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="static")
    return app


def _replay_sync(entry, state, events) -> dict:
    """One replay step in the shape of a committed-move state_sync."""
    return {
        "type": "state_sync",
        "phase": "move" if entry is not None else "snapshot",
        "move_number": state.move_number,
        "moved_by": entry.color.value if entry is not None else None,
        "last_move": move_to_json(entry_move(entry)) if entry is not None else None,
        "events": [event_to_json(e) for e in events],
        "board": board_to_json(state.board),
        "to_move": state.to_move.value,
        "status": state.status,
        "position_hash": hash_hex(state.board),
        "quantum": state_expression(state.board).render(),
    }


def run(addr: str, static_dir: Optional[Path] = None,
        journal_dir: Optional[Path] = None,
        choice_timeout: Optional[float] = None) -> None:
    """Serve the web transport until interrupted.  QGO_LISTEN overrides addr."""
    import uvicorn

    from .server import DEFAULT_CHOICE_TIMEOUT, parse_addr

    addr = os.environ.get("QGO_LISTEN", addr)
    host, port = parse_addr(addr)
    manager = SessionManager(
        journal_dir=journal_dir,
        choice_timeout=DEFAULT_CHOICE_TIMEOUT if choice_timeout is None
        else choice_timeout)
    app = build_app(manager, static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
