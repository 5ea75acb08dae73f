/**
 * The one server connection: socket lifecycle, message dispatch into the
 * view reducer, and the gatekeeping that makes every user action emit
 * exactly one protocol message (and none at all while a collapse belongs
 * to the other seat).
 */

import type { ClientMessage, CreateGameOptions, MoveJson, Seat } from "./protocol";
import { choiceMade, createGame, decode, encode, hello, join, movePlaced, passMove, quantumState, resignMove } from "./protocol";
import type { ClientView } from "./view";
import { initialView, reduce } from "./view";

/** The subset of the browser WebSocket the client needs; node's `ws`
 * package satisfies it too, which is how the tests drive a live server. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(
    type: "open" | "close" | "error" | "message",
    listener: (event: { data?: unknown }) => void,
  ): void;
}

export type SocketFactory = (url: string) => SocketLike;

const defaultFactory: SocketFactory = (url) =>
  new (globalThis as unknown as { WebSocket: new (u: string) => SocketLike }).WebSocket(url);

export class GameClient {
  view: ClientView = initialView();
  private sock: SocketLike | null = null;
  private readonly listeners: Array<(view: ClientView) => void> = [];
  /** Set after answering a prompt; input stays locked until the next sync. */
  private awaitingAnswer = false;

  constructor(
    private readonly url: string,
    private readonly factory: SocketFactory = defaultFactory,
  ) {}

  onChange(fn: (view: ClientView) => void): void {
    this.listeners.push(fn);
  }

  connect(): Promise<void> {
    this.view = { ...this.view, connection: "connecting" };
    this.notify();
    return new Promise((resolve, reject) => {
      const sock = this.factory(this.url);
      this.sock = sock;
      sock.addEventListener("open", () => {
        this.view = { ...this.view, connection: "open" };
        this.notify();
        this.send(hello());
        resolve();
      });
      sock.addEventListener("message", (event) => {
        this.dispatch(String(event.data));
      });
      sock.addEventListener("close", () => {
        this.view = { ...this.view, connection: "closed" };
        this.notify();
      });
      sock.addEventListener("error", () => {
        if (this.view.connection === "connecting") {
          reject(new Error(`cannot reach ${this.url}`));
        }
      });
    });
  }

  close(): void {
    this.sock?.close();
  }

  private dispatch(text: string): void {
    let msg;
    try {
      msg = decode(text);
    } catch {
      return; // not a protocol frame; nothing to update
    }
    if (msg.type === "state_sync" || msg.type === "error") {
      this.awaitingAnswer = false;
    }
    this.view = reduce(this.view, msg);
    this.notify();
  }

  private notify(): void {
    for (const fn of this.listeners) {
      fn(this.view);
    }
  }

  private send(msg: ClientMessage): void {
    if (!this.sock) {
      throw new Error("not connected");
    }
    this.sock.send(encode(msg));
  }

  // -- gated actions ---------------------------------------------------------

  /** A move is sendable only on this seat's turn with no collapse open. */
  canMove(): boolean {
    const v = this.view;
    return (
      v.status === "ongoing" &&
      v.seat !== null &&
      v.seat === v.toMove &&
      !v.resolving &&
      v.prompt === null &&
      !this.awaitingAnswer
    );
  }

  canAnswer(): boolean {
    const v = this.view;
    return v.prompt !== null && v.prompt.chooser === v.seat && !this.awaitingAnswer;
  }

  create(opts: CreateGameOptions = {}): void {
    this.send(createGame(opts));
  }

  joinGame(session: string, seat: Seat, extra: { token?: string; participant?: string } = {}): void {
    this.send(join(session, seat, extra));
  }

  /** Send one placement; returns false (and sends nothing) when gated. */
  place(move: MoveJson): boolean {
    if (!this.canMove() || this.view.session === null) {
      return false;
    }
    this.send(movePlaced(this.view.session, move));
    return true;
  }

  pass(): boolean {
    return this.place(passMove());
  }

  resign(): boolean {
    if (this.view.session === null || this.view.seat === null || this.view.status !== "ongoing") {
      return false;
    }
    this.send(movePlaced(this.view.session, resignMove()));
    return true;
  }

  answerPrompt(point: string): boolean {
    if (!this.canAnswer() || this.view.session === null) {
      return false;
    }
    this.awaitingAnswer = true;
    this.send(choiceMade(this.view.session, point));
    return true;
  }

  requestQuantum(): boolean {
    if (this.view.session === null) {
      return false;
    }
    this.send(quantumState(this.view.session));
    return true;
  }
}
