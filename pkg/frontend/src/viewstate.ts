/** Client-side session state, built exclusively from received messages. */

import { DecodedFrame, decodeRle } from "./rle.js";
import { EventMsg, FrameMsg, RejectedMsg, ServerMsg, StatusMsg } from "./protocol.js";
import { nextResetGeneration, resetEnabled } from "./gating.js";

export const FEED_LIMIT = 200;

export interface FeedEntry {
  generation: number;
  kind: string;
  section: string | null;
  detail: string | null;
}

export interface FailoverBanner {
  killGeneration: number;
  completeGeneration: number;
  latency: number;
}

export class ViewState {
  generation = 0;
  playing = false;
  speed = 92;
  backupRole: "Standby" | "ActingPrimary" = "Standby";
  nextResetGen = 0;
  frame: DecodedFrame | null = null;
  gridWidth = 0;
  gridHeight = 0;
  feed: FeedEntry[] = [];
  banner: FailoverBanner | null = null;
  lastRejection: string | null = null;
  lastError: string | null = null;
  forceReset = false;
  private lastKillGen: number | null = null;

  /** Population of the latest frame (decoded live-cell count). */
  get population(): number {
    return this.frame ? this.frame.cells.length : 0;
  }

  get resetButtonEnabled(): boolean {
    return resetEnabled(this.generation, this.forceReset);
  }

  apply(msg: ServerMsg): void {
    switch (msg.type) {
      case "status":
        this.applyStatus(msg);
        break;
      case "frame":
        this.applyFrame(msg);
        break;
      case "event":
        this.applyEvent(msg);
        break;
      case "rejected":
        this.lastRejection = `${(msg as RejectedMsg).action}: ${msg.reason}`;
        break;
      case "error":
        this.lastError = msg.reason;
        break;
      case "created":
        break;
    }
  }

  private applyStatus(msg: StatusMsg): void {
    this.generation = msg.generation;
    this.playing = msg.state === "running";
    this.speed = msg.speed;
    this.backupRole = msg.backup_role;
    this.nextResetGen = msg.next_reset_gen;
    if (msg.next_reset_gen !== nextResetGeneration(msg.generation)) {
      // server and client disagree about the schedule; surface it
      this.lastError = "reset schedule mismatch";
    }
  }

  private applyFrame(msg: FrameMsg): void {
    try {
      this.frame = decodeRle(msg.rle);
    } catch (e) {
      this.lastError = `malformed frame: ${(e as Error).message}`;
      return;
    }
    this.gridWidth = msg.width;
    this.gridHeight = msg.height;
    if (this.frame.generation !== msg.generation) {
      this.lastError = "frame generation mismatch";
    }
  }

  private applyEvent(msg: EventMsg): void {
    this.feed.push({
      generation: msg.generation,
      kind: msg.kind,
      section: msg.section,
      detail: msg.detail,
    });
    if (this.feed.length > FEED_LIMIT) {
      this.feed.splice(0, this.feed.length - FEED_LIMIT);
    }
    if (msg.kind === "ActionApplied" && msg.detail === "KillPrimary") {
      this.lastKillGen = msg.generation;
      this.banner = null;
    }
    if (msg.kind === "ActionApplied" && msg.detail === "Init") {
      this.feed = this.feed.slice(-1);
      this.banner = null;
      this.lastKillGen = null;
    }
    if (msg.kind === "FailoverComplete" && this.lastKillGen !== null) {
      this.banner = {
        killGeneration: this.lastKillGen,
        completeGeneration: msg.generation,
        latency: msg.generation - this.lastKillGen,
      };
    }
  }
}

/** Color coding for event kinds (shared by renderer and tests). */
export const EVENT_COLORS: Record<string, string> = {
  HeartbeatAnnihilation: "#3fb950",
  HeartbeatLost: "#d29922",
  BlinkerActivated: "#58a6ff",
  FailoverComplete: "#f85149",
  DesyncDetected: "#ff7b72",
  ActionApplied: "#8b949e",
};
