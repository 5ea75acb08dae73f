/**
 * Wire protocol shared with the qugo session server.
 *
 * The server speaks compact JSON objects with a `type` field; over the
 * WebSocket endpoint each object travels in one text frame.  This module
 * owns the message shapes, the client-message builders, and the board
 * coordinate convention (column letters skip "I", row 1 is the bottom
 * edge), so nothing else in the client hand-rolls protocol strings.
 */

export const PROTOCOL_VERSION = 1;

export const COLUMN_LETTERS = "ABCDEFGHJKLMNOPQRSTUVWXYZ";

export type Color = "B" | "W";
export type Seat = Color | "spectator";
export type Phase = "snapshot" | "collapse" | "move" | "finalize";
export type GameStatus = "ongoing" | "finished";

export interface StoneJson {
  point: string;
  color: Color;
  pair: number | null; // null once settled
}

export interface BoardJson {
  size: number;
  stones: StoneJson[];
  captures: Record<Color, number>;
}

export interface EventJson {
  step: number; // 1 mover's pairs, 2 opponent's, 3 the placed pair, 0 finalize
  pair: number;
  kept: string;
  removed: string;
  chooser: Color;
}

export type MoveJson =
  | { kind: "pair"; a: string; b: string }
  | { kind: "single"; point: string }
  | { kind: "pass" }
  | { kind: "resign" };

export interface ScoreJson {
  black_area: number;
  white_area: number;
  dame: number;
  komi: number;
  winner: Color | null;
  margin: number;
}

export interface YouJson {
  seat: Color | null;
  token: string | null;
}

export interface HelloMsg {
  type: "hello";
  server: string;
  protocol: number;
}

export interface StateSyncMsg {
  type: "state_sync";
  session: string;
  phase: Phase;
  move_number: number;
  moved_by: Color | null;
  last_move: MoveJson | null;
  events: EventJson[];
  removed: string[];
  board: BoardJson;
  to_move: Color;
  status: GameStatus;
  position_hash: string | null; // null mid-collapse
  you?: YouJson;
}

export interface ChoicePromptMsg {
  type: "choice_prompt";
  session: string;
  pair: number;
  chooser: Color;
  options: string[];
  forced: string[] | null;
  step: number;
}

export interface GameOverMsg {
  type: "game_over";
  session: string;
  result: string | null; // null when abandoned on a choice timeout
  reason: "scored" | "resignation" | "choice_timeout";
  score: ScoreJson | null;
}

export interface QuantumStateMsg {
  type: "quantum_state";
  session: string;
  expression: string;
}

export interface ErrorMsg {
  type: "error";
  code: string;
  detail: string;
}

export type ServerMessage =
  | HelloMsg
  | StateSyncMsg
  | ChoicePromptMsg
  | GameOverMsg
  | QuantumStateMsg
  | ErrorMsg;

const SERVER_TYPES = new Set([
  "hello",
  "state_sync",
  "choice_prompt",
  "game_over",
  "quantum_state",
  "error",
]);

/** Parse one server frame; throws on anything that is not a known message. */
export function decode(text: string): ServerMessage {
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch {
    throw new Error(`unparseable frame: ${text.slice(0, 80)}`);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new Error("frame is not an object");
  }
  const type = (obj as { type?: unknown }).type;
  if (typeof type !== "string" || !SERVER_TYPES.has(type)) {
    throw new Error(`unknown server message type ${JSON.stringify(type)}`);
  }
  return obj as ServerMessage;
}

// -- client messages ---------------------------------------------------------

export interface CreateGameOptions {
  size?: number;
  komi?: number;
  variant?: string;
  handicap?: string[];
  superko?: "position" | "situation";
  seat?: Seat;
  participant?: string;
}

export type ClientMessage =
  | ({ type: "create_game" } & CreateGameOptions)
  | { type: "hello" }
  | {
      type: "join";
      session: string;
      seat: Seat;
      token?: string;
      participant?: string;
    }
  | { type: "move_placed"; session: string; move: MoveJson }
  | { type: "choice_made"; session: string; point: string }
  | { type: "quantum_state"; session: string };

export function encode(msg: ClientMessage): string {
  return JSON.stringify(msg);
}

export const hello = (): ClientMessage => ({ type: "hello" });

export function createGame(opts: CreateGameOptions = {}): ClientMessage {
  return { type: "create_game", ...opts };
}

export function join(
  session: string,
  seat: Seat,
  extra: { token?: string; participant?: string } = {},
): ClientMessage {
  return { type: "join", session, seat, ...extra };
}

export const movePlaced = (session: string, move: MoveJson): ClientMessage => ({
  type: "move_placed",
  session,
  move,
});

export const choiceMade = (session: string, point: string): ClientMessage => ({
  type: "choice_made",
  session,
  point,
});

export const quantumState = (session: string): ClientMessage => ({
  type: "quantum_state",
  session,
});

export const pairMove = (a: string, b: string): MoveJson => ({ kind: "pair", a, b });
export const singleMove = (point: string): MoveJson => ({ kind: "single", point });
export const passMove = (): MoveJson => ({ kind: "pass" });
export const resignMove = (): MoveJson => ({ kind: "resign" });

// -- board coordinates -------------------------------------------------------

export interface Point {
  col: number; // zero-based, A = 0 (I is skipped)
  row: number; // zero-based, printed row minus one
}

export function parsePoint(text: string, size: number): Point {
  const t = text.trim().toUpperCase();
  const col = COLUMN_LETTERS.indexOf(t[0] ?? "");
  const row = /^\d+$/.test(t.slice(1)) ? parseInt(t.slice(1), 10) - 1 : -1;
  if (col < 0 || col >= size || row < 0 || row >= size) {
    throw new Error(`bad point ${JSON.stringify(text)} for size ${size}`);
  }
  return { col, row };
}

export function formatPoint(p: Point): string {
  return `${COLUMN_LETTERS[p.col]}${p.row + 1}`;
}

export function describeMove(move: MoveJson): string {
  switch (move.kind) {
    case "pair":
      return `pair ${move.a} + ${move.b}`;
    case "single":
      return `stone ${move.point}`;
    case "pass":
      return "pass";
    case "resign":
      return "resign";
  }
}
