/** Replay fetching against a stubbed endpoint, and cursor stepping. */

import { readFileSync } from "node:fs";

import { describe, expect, it } from "vitest";

import { fetchReplay, ReplayCursor, ReplayRequestError } from "../src/replay";
import type { ReplayData } from "../src/replay";

const transcript = JSON.parse(
  readFileSync("tests/fixtures/game1_transcript.json", "utf8"),
) as ReplayData;

function stub(status: number, body: unknown) {
  const calls: Array<{ url: string; init: { method: string; body: string } }> = [];
  const impl = async (url: string, init: { method: string; body: string; headers: Record<string, string> }) => {
    calls.push({ url, init });
    return { status, json: async () => body };
  };
  return { impl, calls };
}

describe("fetchReplay", () => {
  it("posts the record text and returns the parsed replay", async () => {
    const { impl, calls } = stub(200, transcript);
    const data = await fetchReplay("http://host:1234/", "(record)", impl);
    expect(data.result).toBe("B+4");
    expect(data.syncs).toHaveLength(31);
    expect(calls).toHaveLength(1);
    expect(calls[0].url).toBe("http://host:1234/api/replay");
    expect(calls[0].init.method).toBe("POST");
    expect(calls[0].init.body).toBe("(record)");
  });

  it("surfaces a parse rejection with its line number", async () => {
    const { impl } = stub(400, {
      error: { kind: "parse", line: 7, code: "bad_header", detail: "size missing" },
    });
    const err = await fetchReplay("http://h", "x", impl).catch((e) => e);
    expect(err).toBeInstanceOf(ReplayRequestError);
    expect(err.kind).toBe("parse");
    expect(err.line).toBe(7);
    expect(err.message).toBe("size missing");
  });

  it("surfaces a divergence with the failing move", async () => {
    const { impl } = stub(400, {
      error: { kind: "divergence", move: 12, detail: "kept stone is not on the board" },
    });
    const err = await fetchReplay("http://h", "x", impl).catch((e) => e);
    expect(err.kind).toBe("divergence");
    expect(err.move).toBe(12);
  });

  it("wraps non-protocol failures as http errors", async () => {
    const broken = async () => ({
      status: 502,
      json: async (): Promise<unknown> => {
        throw new Error("not json");
      },
    });
    const err = await fetchReplay("http://h", "x", broken).catch((e) => e);
    expect(err).toBeInstanceOf(ReplayRequestError);
    expect(err.kind).toBe("http");

    const empty = stub(200, { unexpected: true });
    const err2 = await fetchReplay("http://h", "x", empty.impl).catch((e) => e);
    expect(err2.kind).toBe("http");
  });
});

describe("ReplayCursor", () => {
  it("starts on the empty snapshot and walks both directions", () => {
    const cursor = new ReplayCursor(transcript.syncs);
    expect(cursor.atStart).toBe(true);
    expect(cursor.current().phase).toBe("snapshot");
    expect(cursor.current().board.stones).toHaveLength(0);

    const first = cursor.forward();
    expect(first.move_number).toBe(1);
    expect(cursor.position).toBe(1);

    cursor.back();
    expect(cursor.atStart).toBe(true);
    cursor.back(); // clamped at the snapshot
    expect(cursor.position).toBe(0);

    const last = cursor.toEnd();
    expect(cursor.atEnd).toBe(true);
    expect(last.move_number).toBe(30);
    cursor.forward(); // clamped at the last sync
    expect(cursor.atEnd).toBe(true);

    expect(cursor.toStart().move_number).toBe(0);
  });

  it("rejects an empty sync stream", () => {
    expect(() => new ReplayCursor([])).toThrow();
  });
});
