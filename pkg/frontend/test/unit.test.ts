import { describe, expect, it } from "vitest";

import { nextResetGeneration, resetEnabled } from "../src/gating.js";
import { decodeRle } from "../src/rle.js";
import { FEED_LIMIT, ViewState } from "../src/viewstate.js";
import { EventMsg, FrameMsg, StatusMsg } from "../src/protocol.js";

describe("reset gating", () => {
  it("is enabled exactly at multiples of 92", () => {
    for (let g = 0; g <= 5 * 92; g++) {
      expect(resetEnabled(g)).toBe(g % 92 === 0);
    }
  });

  it("is disabled at 461 and enabled at 552", () => {
    expect(resetEnabled(461)).toBe(false);
    expect(resetEnabled(552)).toBe(true);
  });

  it("force overrides the schedule", () => {
    expect(resetEnabled(461, true)).toBe(true);
  });

  it("computes the next legal reset generation", () => {
    expect(nextResetGeneration(0)).toBe(0);
    expect(nextResetGeneration(1)).toBe(92);
    expect(nextResetGeneration(461)).toBe(552);
    expect(nextResetGeneration(552)).toBe(552);
  });
});

describe("rle decoding", () => {
  it("decodes a glider with offset metadata", () => {
    const text = [
      "#C generation=7",
      "#C grid=420x200",
      "#C offset=10,20",
      "x = 3, y = 3",
      "bo$2bo$3o!",
    ].join("\n");
    const f = decodeRle(text);
    expect(f.generation).toBe(7);
    expect(f.offsetX).toBe(10);
    expect(f.cells).toHaveLength(5);
    expect(f.cells).toContainEqual([11, 20]);
    expect(f.cells).toContainEqual([10, 22]);
  });

  it("rejects bodies that overflow the header box", () => {
    expect(() => decodeRle("x = 2, y = 1\n3o!")).toThrow(/bounding box/);
  });

  it("rejects unknown tokens", () => {
    expect(() => decodeRle("x = 2, y = 1\n2q!")).toThrow(/token/);
  });
});

function status(generation: number, extra: Partial<StatusMsg> = {}): StatusMsg {
  return {
    v: 1,
    type: "status",
    session: "s1",
    state: "paused",
    speed: 92,
    generation,
    backup_role: "Standby",
    next_reset_gen: generation + ((92 - (generation % 92)) % 92),
    ...extra,
  };
}

function event(generation: number, kind: string, detail: string | null = null): EventMsg {
  return { v: 1, type: "event", session: "s1", generation, kind, section: null, detail };
}

describe("view state", () => {
  it("mirrors status messages and gates the reset button", () => {
    const vs = new ViewState();
    vs.apply(status(461));
    expect(vs.generation).toBe(461);
    expect(vs.resetButtonEnabled).toBe(false);
    vs.apply(status(552));
    expect(vs.resetButtonEnabled).toBe(true);
    vs.apply(status(461));
    vs.forceReset = true;
    expect(vs.resetButtonEnabled).toBe(true);
  });

  it("keeps at most 200 feed entries, newest retained", () => {
    const vs = new ViewState();
    for (let i = 0; i < FEED_LIMIT + 50; i++) {
      vs.apply(event(i, "HeartbeatAnnihilation"));
    }
    expect(vs.feed).toHaveLength(FEED_LIMIT);
    expect(vs.feed[0].generation).toBe(50);
    expect(vs.feed[vs.feed.length - 1].generation).toBe(FEED_LIMIT + 49);
  });

  it("raises the failover banner with measured latency", () => {
    const vs = new ViewState();
    vs.apply(event(920, "ActionApplied", "KillPrimary"));
    expect(vs.banner).toBeNull();
    vs.apply(event(1576, "FailoverComplete"));
    expect(vs.banner).not.toBeNull();
    expect(vs.banner!.latency).toBe(656);
  });

  it("flags malformed frames but keeps running", () => {
    const vs = new ViewState();
    const bad: FrameMsg = {
      v: 1, type: "frame", session: "s1", generation: 3,
      width: 420, height: 200, rle: "not an rle",
    };
    vs.apply(bad);
    expect(vs.lastError).toMatch(/malformed frame/);
    vs.apply(status(4));
    expect(vs.generation).toBe(4);
  });

  it("counts population from the decoded frame", () => {
    const vs = new ViewState();
    const frame: FrameMsg = {
      v: 1, type: "frame", session: "s1", generation: 0,
      width: 420, height: 200,
      rle: "#C generation=0\n#C offset=0,0\nx = 2, y = 2\n2o$2o!",
    };
    vs.apply(frame);
    expect(vs.population).toBe(4);
  });
});
