/**
 * Client view state: a pure fold over received server messages.
 *
 * Everything the UI shows derives from this state plus unsent local input
 * (the half-entered pair in interact.ts).  The reducer never invents board
 * contents; the board snapshot is whatever the last state_sync carried,
 * which is what makes the view property-testable against recorded
 * transcripts.
 */

import type {
  BoardJson,
  ChoicePromptMsg,
  Color,
  ErrorMsg,
  EventJson,
  GameStatus,
  MoveJson,
  Phase,
  ScoreJson,
  ServerMessage,
  StateSyncMsg,
} from "./protocol";
import { describeMove } from "./protocol";

export interface LogEntry {
  moveNumber: number;
  text: string;
}

export interface ClientView {
  connection: "idle" | "connecting" | "open" | "closed";
  serverInfo: { server: string; protocol: number } | null;
  session: string | null;
  seat: Color | null;
  token: string | null;
  board: BoardJson | null;
  toMove: Color | null;
  status: GameStatus | null;
  moveNumber: number;
  positionHash: string | null;
  phase: Phase | null;
  /** True while some pair is being resolved (a collapse is in flight). */
  resolving: boolean;
  /** The outstanding prompt; the server only sends one to its chooser. */
  prompt: ChoicePromptMsg | null;
  lastMove: MoveJson | null;
  lastEvents: EventJson[];
  lastRemoved: string[];
  result: string | null;
  overReason: string | null;
  score: ScoreJson | null;
  quantum: string | null;
  lastError: ErrorMsg | null;
  log: LogEntry[];
}

export function initialView(): ClientView {
  return {
    connection: "idle",
    serverInfo: null,
    session: null,
    seat: null,
    token: null,
    board: null,
    toMove: null,
    status: null,
    moveNumber: 0,
    positionHash: null,
    phase: null,
    resolving: false,
    prompt: null,
    lastMove: null,
    lastEvents: [],
    lastRemoved: [],
    result: null,
    overReason: null,
    score: null,
    quantum: null,
    lastError: null,
    log: [],
  };
}

function describeEvents(events: EventJson[]): string[] {
  return events.map(
    (e) =>
      `pair ${e.pair}: ${e.chooser} keeps ${e.kept}, ${e.removed} is removed` +
      (e.step === 3 ? " (the placed pair)" : ""),
  );
}

function applySync(view: ClientView, msg: StateSyncMsg): ClientView {
  const next: ClientView = {
    ...view,
    session: msg.session,
    board: msg.board,
    toMove: msg.to_move,
    status: msg.status,
    moveNumber: msg.move_number,
    positionHash: msg.position_hash,
    phase: msg.phase,
    lastError: null,
  };
  if (msg.you) {
    next.seat = msg.you.seat;
    next.token = msg.you.token;
  }
  if (msg.phase === "collapse") {
    // a step landed but the move is still open
    next.resolving = true;
    const p = view.prompt;
    if (p && msg.events.some((e) => e.pair === p.pair && e.step === p.step)) {
      next.prompt = null; // the prompted choice is the one that landed
    }
    next.log = [
      ...view.log,
      ...describeEvents(msg.events).map((text) => ({
        moveNumber: msg.move_number,
        text,
      })),
    ];
    return next;
  }
  next.resolving = false;
  next.prompt = null;
  if (msg.phase === "move") {
    next.lastMove = msg.last_move;
    next.lastEvents = msg.events;
    next.lastRemoved = msg.removed;
    const by = msg.moved_by ?? "?";
    const what = msg.last_move ? describeMove(msg.last_move) : "move";
    const capture =
      msg.removed.length > 0 ? `, capturing ${msg.removed.join(" ")}` : "";
    next.log = [
      ...view.log,
      { moveNumber: msg.move_number, text: `${by} ${msg.move_number}: ${what}${capture}` },
    ];
  } else if (msg.phase === "finalize") {
    next.lastEvents = msg.events;
    next.log = [
      ...view.log,
      ...describeEvents(msg.events).map((text) => ({
        moveNumber: msg.move_number,
        text: `end: ${text}`,
      })),
    ];
  }
  return next;
}

export function reduce(view: ClientView, msg: ServerMessage): ClientView {
  switch (msg.type) {
    case "hello":
      return { ...view, serverInfo: { server: msg.server, protocol: msg.protocol } };
    case "state_sync":
      return applySync(view, msg);
    case "choice_prompt":
      return { ...view, prompt: msg, resolving: true, lastError: null };
    case "game_over":
      return {
        ...view,
        status: "finished",
        resolving: false,
        prompt: null,
        result: msg.result,
        overReason: msg.reason,
        score: msg.score,
        log: [
          ...view.log,
          {
            moveNumber: view.moveNumber,
            text: msg.result
              ? `game over: ${msg.result} (${msg.reason})`
              : `game abandoned (${msg.reason})`,
          },
        ],
      };
    case "quantum_state":
      return { ...view, quantum: msg.expression };
    case "error":
      // an error never clears a pending prompt: a rejected answer may be retried
      return { ...view, lastError: msg };
  }
}
