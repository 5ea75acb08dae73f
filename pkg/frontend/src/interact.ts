/**
 * Local input state: the two-click pair entry and the collapse-choice
 * dialog.  Only click-target legality (is the point empty, is the answer
 * allowed) lives here; the server stays authoritative for everything else.
 */

import type { BoardJson, ChoicePromptMsg, MoveJson } from "./protocol";
import { pairMove, singleMove } from "./protocol";

export type PlacementMode = "pair" | "single";

export type ClickOutcome =
  | { action: "marked"; point: string }
  | { action: "cancelled" }
  | { action: "send"; move: MoveJson }
  | { action: "hint"; hint: string };

function occupied(board: BoardJson | null, point: string): boolean {
  return board !== null && board.stones.some((s) => s.point === point);
}

/** First click marks a stone (click it again to cancel); the second click
 * on a distinct empty point completes the pair. */
export class PairEntry {
  first: string | null = null;

  click(point: string, board: BoardJson | null, mode: PlacementMode): ClickOutcome {
    if (occupied(board, point)) {
      return { action: "hint", hint: `${point} is occupied` };
    }
    if (mode === "single") {
      this.first = null;
      return { action: "send", move: singleMove(point) };
    }
    if (this.first === null) {
      this.first = point;
      return { action: "marked", point };
    }
    if (this.first === point) {
      this.first = null;
      return { action: "cancelled" };
    }
    const move = pairMove(this.first, point);
    this.first = null;
    return { action: "send", move };
  }

  cancel(): void {
    this.first = null;
  }
}

export interface PromptOption {
  point: string;
  enabled: boolean;
}

/** Both pair halves, with only the allowed answers clickable. */
export function promptOptions(prompt: ChoicePromptMsg): PromptOption[] {
  const allowed = new Set(prompt.forced ?? prompt.options);
  return prompt.options.map((point) => ({ point, enabled: allowed.has(point) }));
}

export function promptCaption(prompt: ChoicePromptMsg): string {
  const what =
    prompt.step === 3
      ? "your placed pair"
      : prompt.step === 0
        ? `pair ${prompt.pair} (end of game)`
        : `pair ${prompt.pair}`;
  return `${prompt.chooser} to choose: keep which half of ${what}?`;
}

export function forcedExplanation(prompt: ChoicePromptMsg): string | null {
  if (!prompt.forced) {
    return null;
  }
  return (
    "Forced: the placed pair must keep a stone adjacent to a stone " +
    "kept earlier this move."
  );
}

/**
 * Build the choice dialog under `container`.  Clicking an enabled option
 * calls `onAnswer` once and disables every button until the next sync
 * rebuilds the UI.
 */
export function renderPromptDialog(
  container: HTMLElement,
  prompt: ChoicePromptMsg,
  onAnswer: (point: string) => void,
): void {
  container.replaceChildren();
  const box = document.createElement("div");
  box.className = "prompt-dialog";

  const caption = document.createElement("p");
  caption.className = "prompt-caption";
  caption.textContent = promptCaption(prompt);
  box.appendChild(caption);

  const note = forcedExplanation(prompt);
  if (note) {
    const p = document.createElement("p");
    p.className = "prompt-forced-note";
    p.textContent = note;
    box.appendChild(p);
  }

  const row = document.createElement("div");
  row.className = "prompt-options";
  const buttons: HTMLButtonElement[] = [];
  for (const option of promptOptions(prompt)) {
    const btn = document.createElement("button");
    btn.type = "button";
    btn.className = "prompt-option";
    btn.textContent = `keep ${option.point}`;
    btn.dataset.point = option.point;
    btn.disabled = !option.enabled;
    btn.addEventListener("click", () => {
      if (btn.disabled) {
        return;
      }
      for (const b of buttons) {
        b.disabled = true;
      }
      onAnswer(option.point);
    });
    buttons.push(btn);
    row.appendChild(btn);
  }
  box.appendChild(row);
  container.appendChild(box);
}
