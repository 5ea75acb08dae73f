/**
 * Replay mode: upload a .qgr record, get back the server's full sync
 * stream, and step through it with the same rendering path live play
 * uses.  No client-side rules engine; the server replays the record.
 */

import type { BoardJson, StateSyncMsg } from "./protocol";

export interface ReplayRecordInfo {
  size: number;
  komi: number;
  variant: string;
  handicap: string[];
}

/** Replay steps mirror committed-move syncs but belong to no session, and
 * each carries the rendered quantum expression for that position. */
export type ReplaySync = Omit<StateSyncMsg, "session" | "removed" | "you"> & {
  quantum: string;
};

export interface ReplayData {
  record: ReplayRecordInfo;
  result: string | null;
  final_board: BoardJson;
  syncs: ReplaySync[];
}

export class ReplayRequestError extends Error {
  constructor(
    message: string,
    readonly kind: "parse" | "divergence" | "http",
    readonly line?: number,
    readonly move?: number,
  ) {
    super(message);
  }
}

type FetchLike = (
  url: string,
  init: { method: string; headers: Record<string, string>; body: string },
) => Promise<{
  status: number;
  json(): Promise<unknown>;
}>;

export async function fetchReplay(
  baseUrl: string,
  qgrText: string,
  fetchImpl?: FetchLike,
): Promise<ReplayData> {
  const doFetch = fetchImpl ?? (fetch as unknown as FetchLike);
  const resp = await doFetch(`${baseUrl.replace(/\/$/, "")}/api/replay`, {
    method: "POST",
    headers: { "content-type": "text/plain; charset=utf-8" },
    body: qgrText,
  });
  let body: Record<string, unknown>;
  try {
    body = (await resp.json()) as Record<string, unknown>;
  } catch {
    body = {}; // a proxy error page is still reported, just without detail
  }
  if (resp.status !== 200) {
    const err = (body.error ?? {}) as {
      kind?: "parse" | "divergence";
      detail?: string;
      line?: number;
      move?: number;
    };
    throw new ReplayRequestError(
      err.detail ?? `replay failed with status ${resp.status}`,
      err.kind ?? "http",
      err.line,
      err.move,
    );
  }
  if (!Array.isArray(body.syncs)) {
    throw new ReplayRequestError("replay response is missing its syncs", "http");
  }
  return body as unknown as ReplayData;
}

/** Step cursor over the sync stream (index 0 is the empty-board snapshot). */
export class ReplayCursor {
  private index = 0;

  constructor(readonly syncs: ReplaySync[]) {
    if (syncs.length === 0) {
      throw new Error("a replay always carries at least the starting snapshot");
    }
  }

  current(): ReplaySync {
    return this.syncs[this.index];
  }

  get position(): number {
    return this.index;
  }

  get atStart(): boolean {
    return this.index === 0;
  }

  get atEnd(): boolean {
    return this.index === this.syncs.length - 1;
  }

  forward(): ReplaySync {
    if (!this.atEnd) {
      this.index += 1;
    }
    return this.current();
  }

  back(): ReplaySync {
    if (!this.atStart) {
      this.index -= 1;
    }
    return this.current();
  }

  toStart(): ReplaySync {
    this.index = 0;
    return this.current();
  }

  toEnd(): ReplaySync {
    this.index = this.syncs.length - 1;
    return this.current();
  }
}
