/** Headless round-trip against the real python service.
 *
 * Spawns `python3 -m lifelab.service`, connects over TCP, plays to
 * generation 920, kills the primary, and waits for FailoverComplete in
 * the feed; also verifies reset gating against live generations 461 and
 * 552 and that the server rejects an off-schedule reset.
 */

import { spawn, ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SessionClient } from "../src/client.js";
import { TcpTransport } from "../src/tcp.js";
import { resetEnabled } from "../src/gating.js";
import { ServerMsg } from "../src/protocol.js";
import { ViewState } from "../src/viewstate.js";

const PORT = 7391;
let service: ChildProcess;

function waitFor<T>(
  poll: () => T | undefined,
  timeoutMs: number,
  what: string
): Promise<T> {
  const started = Date.now();
  return new Promise((resolve, reject) => {
    const tick = () => {
      const got = poll();
      if (got !== undefined) return resolve(got);
      if (Date.now() - started > timeoutMs) {
        return reject(new Error(`timed out waiting for ${what}`));
      }
      setTimeout(tick, 25);
    };
    tick();
  });
}

beforeAll(async () => {
  service = spawn(
    "python3",
    ["-m", "lifelab.service", "--listen", `127.0.0.1:${PORT}`],
    { cwd: "..", stdio: ["ignore", "pipe", "inherit"] }
  );
  await new Promise<void>((resolve, reject) => {
    service.stdout!.on("data", (chunk: Buffer) => {
      if (chunk.toString().includes("listening")) resolve();
    });
    service.on("exit", (code) => reject(new Error(`service exited: ${code}`)));
    setTimeout(() => reject(new Error("service did not start")), 15000);
  });
}, 20000);

afterAll(() => {
  service?.kill();
});

describe("service round trip", () => {
  it("plays to 920, fails over after KillPrimary, and gates resets", async () => {
    const transport = await TcpTransport.connect("127.0.0.1", PORT);
    const client = new SessionClient(transport);
    const state = new ViewState();
    const raw: ServerMsg[] = [];
    client.onMessage((msg) => {
      raw.push(msg);
      state.apply(msg);
    });

    client.create("builtin");
    await waitFor(() => client.session ?? undefined, 5000, "session id");
    client.subscribe();
    await waitFor(() => (state.frame ? true : undefined), 5000, "first frame");
    expect(state.generation).toBe(0);
    expect(state.population).toBeGreaterThan(0);
    expect(state.resetButtonEnabled).toBe(true); // generation 0

    // live gating checkpoints: 461 disabled, 552 enabled
    client.step(461);
    await waitFor(
      () => (state.generation === 461 ? true : undefined),
      20000,
      "generation 461"
    );
    expect(state.resetButtonEnabled).toBe(false);
    expect(state.nextResetGen).toBe(552);
    client.step(91);
    await waitFor(
      () => (state.generation === 552 ? true : undefined),
      20000,
      "generation 552"
    );
    expect(state.resetButtonEnabled).toBe(true);

    // server-side rejection of an off-schedule reset
    client.step(9); // generation 561
    await waitFor(
      () => (state.generation === 561 ? true : undefined),
      20000,
      "generation 561"
    );
    client.action("ResetBackup");
    await waitFor(() => state.lastRejection ?? undefined, 5000, "rejection");
    expect(state.lastRejection).toMatch(/92/);

    // play up to 920 at high speed
    client.setSpeed(4000);
    client.play();
    await waitFor(
      () => (state.generation >= 920 ? true : undefined),
      60000,
      "generation 920"
    );
    client.pause();
    await waitFor(() => (!state.playing ? true : undefined), 5000, "pause");

    // kill and observe the takeover in the feed
    const killedAround = state.generation;
    client.action("KillPrimary");
    client.play();
    const banner = await waitFor(
      () => state.banner ?? undefined,
      120000,
      "FailoverComplete"
    );
    client.pause();
    expect(banner.killGeneration).toBeGreaterThanOrEqual(killedAround);
    expect(banner.latency).toBeGreaterThan(0);
    expect(banner.latency).toBeLessThanOrEqual(1840); // 20 periods, worst case
    expect(state.backupRole).toBe("ActingPrimary");

    // the feed never fabricates entries: every one maps to a raw message
    const rawEvents = raw.filter((m) => m.type === "event");
    expect(state.feed.length).toBeGreaterThan(0);
    expect(state.feed.length).toBeLessThanOrEqual(rawEvents.length);
    for (const entry of state.feed) {
      expect(
        rawEvents.some(
          (m) =>
            m.type === "event" &&
            m.generation === entry.generation &&
            m.kind === entry.kind
        )
      ).toBe(true);
    }

    // pure gating law matches what we observed live
    for (const g of [0, 461, 552, 561]) {
      expect(resetEnabled(g)).toBe(g % 92 === 0);
    }

    client.close();
  }, 240000);
});
