/**
 * Browser bootstrap: wires the connection form, the interactive board,
 * the collapse dialog, the log, and replay stepping onto the static page.
 */

import { renderBoard } from "./board";
import { GameClient } from "./client";
import { PairEntry, renderPromptDialog } from "./interact";
import type { Color } from "./protocol";
import { fetchReplay, ReplayCursor } from "./replay";
import type { ReplaySync } from "./replay";
import type { ClientView } from "./view";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  return node as T;
}

function placementMode(variant: string, seat: Color | null): "pair" | "single" {
  if (variant === "semiquantum-black" && seat === "W") {
    return "single";
  }
  if (variant === "semiquantum-white" && seat === "B") {
    return "single";
  }
  return "pair";
}

function shortHash(hash: string | null): string {
  return hash ? hash.slice(0, 12) : "…";
}

class App {
  client: GameClient | null = null;
  entry = new PairEntry();
  variant = "standard";
  hint = "";
  replay: ReplayCursor | null = null;
  private httpBase = location.origin;
  private variantFor: string | null = null;

  get replayMode(): boolean {
    return this.replay !== null;
  }

  start(): void {
    byId<HTMLButtonElement>("create").addEventListener("click", () => {
      void this.connectAnd((client) => {
        this.variant = byId<HTMLSelectElement>("variant").value;
        client.create({
          size: parseInt(byId<HTMLInputElement>("size").value, 10),
          komi: parseFloat(byId<HTMLInputElement>("komi").value),
          variant: this.variant,
          seat: byId<HTMLSelectElement>("seat").value as Color | "spectator",
          participant: byId<HTMLInputElement>("name").value || "web",
        });
      });
    });
    byId<HTMLButtonElement>("join").addEventListener("click", () => {
      void this.connectAnd((client) => {
        client.joinGame(
          byId<HTMLInputElement>("session").value.trim(),
          byId<HTMLSelectElement>("seat").value as Color | "spectator",
          {
            token: byId<HTMLInputElement>("token").value.trim() || undefined,
            participant: byId<HTMLInputElement>("name").value || "web",
          },
        );
      });
    });
    byId<HTMLButtonElement>("pass").addEventListener("click", () => {
      if (this.client && !this.client.pass()) {
        this.setHint("cannot pass right now");
      }
    });
    byId<HTMLButtonElement>("resign").addEventListener("click", () => {
      this.client?.resign();
    });
    byId<HTMLButtonElement>("quantum").addEventListener("click", () => {
      this.client?.requestQuantum();
    });
    byId<HTMLButtonElement>("load-replay").addEventListener("click", () => {
      void this.loadReplay();
    });
    byId<HTMLButtonElement>("replay-close").addEventListener("click", () => {
      this.replay = null;
      byId("replay-controls").hidden = true;
      this.renderLive();
    });
    for (const [id, step] of [
      ["replay-start", (c: ReplayCursor) => c.toStart()],
      ["replay-back", (c: ReplayCursor) => c.back()],
      ["replay-next", (c: ReplayCursor) => c.forward()],
      ["replay-end", (c: ReplayCursor) => c.toEnd()],
    ] as const) {
      byId<HTMLButtonElement>(id).addEventListener("click", () => {
        if (this.replay) {
          this.renderSync(step(this.replay));
        }
      });
    }
    renderBoard(byId<HTMLElement>("board") as unknown as SVGSVGElement, null);
  }

  private async connectAnd(action: (client: GameClient) => void): Promise<void> {
    if (!this.client) {
      const scheme = location.protocol === "https:" ? "wss" : "ws";
      const url = byId<HTMLInputElement>("server").value.trim() ||
        `${scheme}://${location.host}/ws`;
      this.httpBase = url.replace(/^ws/, "http").replace(/\/ws$/, "");
      this.client = new GameClient(url);
      this.client.onChange(() => this.renderLive());
      try {
        await this.client.connect();
      } catch (err) {
        this.client = null;
        this.setHint(String(err));
        return;
      }
    }
    action(this.client);
  }

  private setHint(text: string): void {
    this.hint = text;
    byId("hint").textContent = text;
  }

  private handlePoint(point: string): void {
    if (!this.client || this.replayMode) {
      return;
    }
    const view = this.client.view;
    if (view.prompt && this.client.canAnswer()) {
      this.setHint("answer the collapse choice first");
      return;
    }
    if (!this.client.canMove()) {
      this.setHint("not your turn");
      return;
    }
    const mode = placementMode(this.variant, view.seat);
    const outcome = this.entry.click(point, view.board, mode);
    switch (outcome.action) {
      case "marked":
        this.setHint(`first stone at ${outcome.point}; click the second point`);
        break;
      case "cancelled":
        this.setHint("placement cancelled");
        break;
      case "hint":
        this.setHint(outcome.hint);
        break;
      case "send":
        if (!this.client.place(outcome.move)) {
          this.setHint("the server is resolving a move; wait for the sync");
        } else {
          this.setHint("");
        }
        break;
    }
    this.renderLive();
  }

  /** A joiner learns the variant from the session listing, not the sync
   * stream; placement mode depends on it for the semiquantum rules. */
  private maybeLoadVariant(session: string): void {
    if (this.variantFor === session) {
      return;
    }
    this.variantFor = session;
    void fetch(`${this.httpBase}/api/sessions`)
      .then((r) => r.json())
      .then((data: { sessions: Array<{ session: string; variant: string }> }) => {
        const row = data.sessions.find((s) => s.session === session);
        if (row) {
          this.variant = row.variant;
        }
      })
      .catch(() => {
        this.variantFor = null; // retry on the next sync
      });
  }

  private renderLive(): void {
    if (!this.client || this.replayMode) {
      return;
    }
    const view = this.client.view;
    if (view.session) {
      this.maybeLoadVariant(view.session);
    }
    this.renderCommon(view.board, {
      lastPlaced: lastMovePoints(view),
      survivors: view.lastEvents.map((e) => e.kept),
      marked: this.entry.first,
    });
    byId("status").textContent = statusLine(view);
    byId("session-id").textContent = view.session ?? "";
    if (view.token) {
      byId<HTMLInputElement>("token").value = view.token;
    }
    const promptBox = byId("prompt");
    if (view.prompt && this.client.canAnswer()) {
      renderPromptDialog(promptBox, view.prompt, (point) => {
        this.client?.answerPrompt(point);
        this.setHint(`kept ${point}; waiting for the server`);
      });
    } else {
      promptBox.replaceChildren();
    }
    byId("quantum-out").textContent = view.quantum ?? "";
    if (view.lastError) {
      this.setHint(`${view.lastError.code}: ${view.lastError.detail}`);
    }
    const log = byId("log");
    log.replaceChildren();
    for (const entry of view.log.slice(-100)) {
      const li = document.createElement("li");
      li.textContent = entry.text;
      log.appendChild(li);
    }
    log.scrollTop = log.scrollHeight;
  }

  private renderSync(sync: ReplaySync): void {
    this.renderCommon(sync.board, {
      survivors: sync.events.map((e) => e.kept),
    });
    const where = this.replay
      ? `${this.replay.position}/${this.replay.syncs.length - 1}`
      : "";
    byId("status").textContent =
      `replay ${where} | move ${sync.move_number} | ${sync.to_move} to move` +
      ` | hash ${shortHash(sync.position_hash)}`;
  }

  private renderCommon(
    board: Parameters<typeof renderBoard>[1],
    highlights: Parameters<typeof renderBoard>[3],
  ): void {
    renderBoard(
      byId<HTMLElement>("board") as unknown as SVGSVGElement,
      board,
      { onPoint: (p) => this.handlePoint(p) },
      highlights,
    );
  }

  private async loadReplay(): Promise<void> {
    const text = byId<HTMLTextAreaElement>("replay-text").value;
    if (!text.trim()) {
      this.setHint("paste a .qgr record first");
      return;
    }
    try {
      const data = await fetchReplay(this.httpBase, text);
      this.replay = new ReplayCursor(data.syncs);
      byId("replay-controls").hidden = false;
      byId("replay-result").textContent = data.result ?? "unfinished";
      this.renderSync(this.replay.toEnd());
    } catch (err) {
      this.setHint(String(err));
    }
  }
}

function lastMovePoints(view: ClientView): string[] {
  const move = view.lastMove;
  if (!move) {
    return [];
  }
  if (move.kind === "pair") {
    return [move.a, move.b];
  }
  if (move.kind === "single") {
    return [move.point];
  }
  return [];
}

function statusLine(view: ClientView): string {
  if (view.connection !== "open") {
    return view.connection;
  }
  if (!view.board) {
    return "connected; create or join a game";
  }
  const caps = view.board.captures;
  const base =
    `move ${view.moveNumber} | ${view.toMove} to move | ` +
    `captures B:${caps.B} W:${caps.W} | hash ${shortHash(view.positionHash)}`;
  if (view.result) {
    return `${base} | ${view.result}`;
  }
  if (view.status === "finished") {
    return `${base} | finished`;
  }
  return view.seat ? `${base} | you are ${view.seat}` : `${base} | spectating`;
}

if (typeof document !== "undefined" && document.getElementById("board")) {
  new App().start();
}
