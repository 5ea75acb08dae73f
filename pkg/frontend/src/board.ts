/**
 * SVG goban renderer.
 *
 * Renders straight from a board snapshot: settled stones are solid discs,
 * entangled halves are hollow discs joined to their partner by a dashed
 * link and share a numbered badge (the move that placed the pair).  The
 * renderer holds no game state of its own; callers re-render per sync.
 */

import type { BoardJson, StoneJson } from "./protocol";
import { COLUMN_LETTERS, formatPoint, parsePoint } from "./protocol";

export const CELL = 34;
export const MARGIN = 30;

export interface Highlights {
  /** Points of the move just committed. */
  lastPlaced?: string[];
  /** Kept halves of the latest collapse events. */
  survivors?: string[];
  /** The first click of a half-entered pair. */
  marked?: string | null;
}

export interface BoardHandlers {
  onPoint?: (point: string) => void;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function el(
  name: string,
  attrs: Record<string, string | number>,
  text?: string,
): SVGElement {
  const node = document.createElementNS(SVG_NS, name);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, String(v));
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node as SVGElement;
}

function xy(point: string, size: number): { x: number; y: number } {
  const p = parsePoint(point, size);
  return {
    x: MARGIN + p.col * CELL,
    y: MARGIN + (size - 1 - p.row) * CELL, // row 1 sits at the bottom
  };
}

function starPoints(size: number): string[] {
  if (size < 7) {
    return size % 2 === 1 ? [formatPoint({ col: (size - 1) / 2, row: (size - 1) / 2 })] : [];
  }
  const edge = size >= 13 ? 3 : 2;
  const positions = [edge, size - 1 - edge];
  if (size % 2 === 1) {
    positions.push((size - 1) / 2);
  }
  const pts: string[] = [];
  for (const col of positions) {
    for (const row of positions) {
      pts.push(formatPoint({ col, row }));
    }
  }
  return pts;
}

/** Replace the contents of `svg` with the rendered position. */
export function renderBoard(
  svg: SVGSVGElement,
  board: BoardJson | null,
  handlers: BoardHandlers = {},
  highlights: Highlights = {},
): void {
  const size = board?.size ?? 9;
  const span = 2 * MARGIN + (size - 1) * CELL;
  svg.setAttribute("viewBox", `0 0 ${span} ${span}`);
  svg.replaceChildren();

  svg.appendChild(
    el("rect", { x: 0, y: 0, width: span, height: span, class: "goban" }),
  );

  const grid = el("g", { class: "grid" });
  for (let i = 0; i < size; i++) {
    const off = MARGIN + i * CELL;
    const end = MARGIN + (size - 1) * CELL;
    grid.appendChild(el("line", { x1: MARGIN, y1: off, x2: end, y2: off }));
    grid.appendChild(el("line", { x1: off, y1: MARGIN, x2: off, y2: end }));
  }
  for (const point of starPoints(size)) {
    const { x, y } = xy(point, size);
    grid.appendChild(el("circle", { cx: x, cy: y, r: 3, class: "star" }));
  }
  svg.appendChild(grid);

  const labels = el("g", { class: "labels" });
  for (let col = 0; col < size; col++) {
    labels.appendChild(
      el(
        "text",
        { x: MARGIN + col * CELL, y: span - 6, "text-anchor": "middle" },
        COLUMN_LETTERS[col],
      ),
    );
  }
  for (let row = 0; row < size; row++) {
    labels.appendChild(
      el(
        "text",
        {
          x: 8,
          y: MARGIN + (size - 1 - row) * CELL + 4,
          "text-anchor": "middle",
        },
        String(row + 1),
      ),
    );
  }
  svg.appendChild(labels);

  const stones = board?.stones ?? [];
  const byPair = new Map<number, StoneJson[]>();
  for (const s of stones) {
    if (s.pair !== null) {
      const group = byPair.get(s.pair) ?? [];
      group.push(s);
      byPair.set(s.pair, group);
    }
  }

  const links = el("g", { class: "links" });
  for (const [pair, halves] of byPair) {
    if (halves.length === 2) {
      const a = xy(halves[0].point, size);
      const b = xy(halves[1].point, size);
      links.appendChild(
        el("line", {
          x1: a.x,
          y1: a.y,
          x2: b.x,
          y2: b.y,
          class: "link",
          "data-pair": pair,
        }),
      );
    }
  }
  svg.appendChild(links);

  const marks = el("g", { class: "marks" });
  for (const point of highlights.survivors ?? []) {
    const { x, y } = xy(point, size);
    marks.appendChild(el("circle", { cx: x, cy: y, r: CELL * 0.58, class: "survivor" }));
  }
  for (const point of highlights.lastPlaced ?? []) {
    const { x, y } = xy(point, size);
    marks.appendChild(el("circle", { cx: x, cy: y, r: CELL * 0.5, class: "last-move" }));
  }
  if (highlights.marked) {
    const { x, y } = xy(highlights.marked, size);
    marks.appendChild(el("circle", { cx: x, cy: y, r: CELL * 0.42, class: "marked" }));
  }
  svg.appendChild(marks);

  const stoneLayer = el("g", { class: "stones" });
  for (const s of stones) {
    const { x, y } = xy(s.point, size);
    const colorClass = s.color === "B" ? "black" : "white";
    const group = el("g", { class: "stone-group" });
    group.setAttribute("data-stone", "");
    group.setAttribute("data-point", s.point);
    group.setAttribute("data-color", s.color);
    if (s.pair !== null) {
      group.setAttribute("data-pair", String(s.pair));
      group.appendChild(
        el("circle", { cx: x, cy: y, r: CELL * 0.42, class: `half ${colorClass}` }),
      );
      group.appendChild(
        el(
          "text",
          { x, y: y + 4, "text-anchor": "middle", class: `badge ${colorClass}` },
          String(s.pair),
        ),
      );
    } else {
      group.appendChild(
        el("circle", { cx: x, cy: y, r: CELL * 0.42, class: `stone ${colorClass}` }),
      );
    }
    stoneLayer.appendChild(group);
  }
  svg.appendChild(stoneLayer);

  const hits = el("g", { class: "hits" });
  for (let col = 0; col < size; col++) {
    for (let row = 0; row < size; row++) {
      const point = formatPoint({ col, row });
      const { x, y } = xy(point, size);
      const hit = el("circle", { cx: x, cy: y, r: CELL * 0.48, class: "hit" });
      hit.setAttribute("data-point", point);
      if (handlers.onPoint) {
        hit.addEventListener("click", () => handlers.onPoint!(point));
      }
      hits.appendChild(hit);
    }
  }
  svg.appendChild(hits);
}
