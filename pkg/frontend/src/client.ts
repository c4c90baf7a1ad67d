/** Transport-independent session client over a line-delimited JSON stream. */

import { ActionName, ClientMsg, ServerMsg, V, parseServerMsg } from "./protocol.js";

/** A bidirectional text stream: browser WebSocket bridge or node TCP. */
export interface Transport {
  send(line: string): void;
  onLine(handler: (line: string) => void): void;
  close(): void;
}

export class SessionClient {
  private sessionId: string | null = null;
  private handlers: Array<(msg: ServerMsg) => void> = [];

  constructor(private transport: Transport) {
    transport.onLine((line) => {
      if (!line.trim()) return;
      const msg = parseServerMsg(line);
      if (msg.type === "created") this.sessionId = msg.session;
      for (const h of this.handlers) h(msg);
    });
  }

  get session(): string | null {
    return this.sessionId;
  }

  onMessage(handler: (msg: ServerMsg) => void): void {
    this.handlers.push(handler);
  }

  private send(msg: ClientMsg): void {
    this.transport.send(JSON.stringify(msg));
  }

  private mustSession(): string {
    if (this.sessionId === null) throw new Error("no session created yet");
    return this.sessionId;
  }

  create(config: "builtin" | { file: string } = "builtin"): void {
    this.send({ v: V, type: "create", config });
  }

  subscribe(): void {
    this.send({ v: V, type: "subscribe", session: this.mustSession() });
  }

  action(name: ActionName, force = false): void {
    this.send({ v: V, type: "action", session: this.mustSession(), name, force });
  }

  play(): void {
    this.send({ v: V, type: "control", session: this.mustSession(), op: "play" });
  }

  pause(): void {
    this.send({ v: V, type: "control", session: this.mustSession(), op: "pause" });
  }

  step(n: number): void {
    this.send({ v: V, type: "control", session: this.mustSession(), op: "step", n });
  }

  setSpeed(speed: number): void {
    this.send({ v: V, type: "control", session: this.mustSession(), op: "speed", speed });
  }

  close(): void {
    this.transport.close();
  }
}
