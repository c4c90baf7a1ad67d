/** Node TCP transport for headless clients and tests. */

import * as net from "node:net";
import { Transport } from "./client.js";

export class TcpTransport implements Transport {
  private socket: net.Socket;
  private buffer = "";
  private lineHandler: ((line: string) => void) | null = null;

  private constructor(socket: net.Socket) {
    this.socket = socket;
    socket.setEncoding("utf8");
    socket.on("data", (chunk: string) => {
      this.buffer += chunk;
      let idx: number;
      while ((idx = this.buffer.indexOf("\n")) >= 0) {
        const line = this.buffer.slice(0, idx);
        this.buffer = this.buffer.slice(idx + 1);
        if (this.lineHandler) this.lineHandler(line);
      }
    });
  }

  static connect(host: string, port: number): Promise<TcpTransport> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port }, () =>
        resolve(new TcpTransport(socket))
      );
      socket.once("error", reject);
    });
  }

  send(line: string): void {
    this.socket.write(line + "\n");
  }

  onLine(handler: (line: string) => void): void {
    this.lineHandler = handler;
  }

  close(): void {
    this.socket.end();
    this.socket.destroy();
  }
}
