/** Browser entry point.
 *
 * The service speaks line-delimited JSON over TCP; browsers cannot open
 * raw TCP sockets, so point this page at a WebSocket-to-TCP bridge (for
 * example `websockify 7200 127.0.0.1:7199`) and set the URL below or use
 * the `?server=` query parameter.
 */

import { SessionClient, Transport } from "./client.js";
import { canvasSize, render } from "./render.js";
import { EVENT_COLORS, ViewState } from "./viewstate.js";

class WebSocketTransport implements Transport {
  private buffer = "";
  private lineHandler: ((line: string) => void) | null = null;

  constructor(private ws: WebSocket) {
    ws.onmessage = (ev) => {
      this.buffer += typeof ev.data === "string" ? ev.data : "";
      let idx: number;
      while ((idx = this.buffer.indexOf("\n")) >= 0) {
        const line = this.buffer.slice(0, idx);
        this.buffer = this.buffer.slice(idx + 1);
        if (this.lineHandler) this.lineHandler(line);
      }
    };
  }

  send(line: string): void {
    this.ws.send(line + "\n");
  }

  onLine(handler: (line: string) => void): void {
    this.lineHandler = handler;
  }

  close(): void {
    this.ws.close();
  }
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function main(): void {
  const params = new URLSearchParams(window.location.search);
  const url = params.get("server") ?? "ws://127.0.0.1:7200";
  const state = new ViewState();
  const canvas = el<HTMLCanvasElement>("grid");
  const ctx = canvas.getContext("2d")!;
  const feedNode = el<HTMLUListElement>("feed");
  const statusNode = el<HTMLDivElement>("status");
  const bannerNode = el<HTMLDivElement>("banner");
  const errorNode = el<HTMLDivElement>("errors");
  const resetBtn = el<HTMLButtonElement>("reset");
  const forceToggle = el<HTMLInputElement>("force");

  const ws = new WebSocket(url);
  const client = new SessionClient(new WebSocketTransport(ws));

  const buttons = ["init", "kill", "reset", "play", "pause", "step"];
  const setConnected = (ok: boolean) => {
    for (const id of buttons) el<HTMLButtonElement>(id).disabled = !ok;
  };
  setConnected(false);

  ws.onopen = () => {
    setConnected(true);
    client.create("builtin");
  };
  ws.onclose = () => setConnected(false);

  client.onMessage((msg) => {
    if (msg.type === "created") client.subscribe();
    state.apply(msg);
    redraw();
  });

  function redraw(): void {
    const size = canvasSize(state);
    if (size.width && (canvas.width !== size.width || canvas.height !== size.height)) {
      canvas.width = size.width;
      canvas.height = size.height;
    }
    render(ctx, state);
    statusNode.textContent =
      `generation ${state.generation} | ${state.playing ? "running" : "paused"} ` +
      `@ ${state.speed} gen/s | population ${state.population} | ` +
      `backup: ${state.backupRole} | next legal reset: ${state.nextResetGen}`;
    resetBtn.disabled = !state.resetButtonEnabled;
    feedNode.innerHTML = "";
    for (const e of state.feed.slice().reverse()) {
      const li = document.createElement("li");
      li.style.color = EVENT_COLORS[e.kind] ?? "#e6edf3";
      li.textContent =
        `gen ${e.generation} ${e.kind}` +
        (e.section ? ` [${e.section}]` : "") +
        (e.detail ? ` ${e.detail}` : "");
      feedNode.appendChild(li);
    }
    if (state.banner) {
      bannerNode.style.display = "block";
      bannerNode.textContent =
        `FAILOVER COMPLETE: killed at ${state.banner.killGeneration}, ` +
        `took over at ${state.banner.completeGeneration} ` +
        `(latency ${state.banner.latency} generations)`;
    }
    errorNode.textContent = state.lastError ?? state.lastRejection ?? "";
  }

  el("init").onclick = () => client.action("Init");
  el("kill").onclick = () => client.action("KillPrimary");
  resetBtn.onclick = () => client.action("ResetBackup", state.forceReset);
  forceToggle.onchange = () => {
    state.forceReset = forceToggle.checked;
    redraw();
  };
  el("play").onclick = () => client.play();
  el("pause").onclick = () => client.pause();
  el("step").onclick = () => client.step(92);
  el<HTMLInputElement>("speed").onchange = (ev) =>
    client.setSpeed(Number((ev.target as HTMLInputElement).value));
}

main();
