/** Wire messages for the line-delimited JSON session protocol (v1). */

export const V = 1;

export type ActionName = "Init" | "KillPrimary" | "ResetBackup";

export interface CreatedMsg {
  v: number;
  type: "created";
  session: string;
}

export interface StatusMsg {
  v: number;
  type: "status";
  session: string;
  state: "running" | "paused";
  speed: number;
  generation: number;
  backup_role: "Standby" | "ActingPrimary";
  next_reset_gen: number;
}

export interface FrameMsg {
  v: number;
  type: "frame";
  session: string;
  generation: number;
  width: number;
  height: number;
  rle: string;
}

export interface EventMsg {
  v: number;
  type: "event";
  session: string;
  generation: number;
  kind: string;
  section: string | null;
  detail: string | null;
}

export interface RejectedMsg {
  v: number;
  type: "rejected";
  session: string;
  action: string;
  reason: string;
}

export interface ErrorMsg {
  v: number;
  type: "error";
  reason: string;
}

export type ServerMsg =
  | CreatedMsg
  | StatusMsg
  | FrameMsg
  | EventMsg
  | RejectedMsg
  | ErrorMsg;

export interface CreateMsg {
  v: number;
  type: "create";
  config: "builtin" | { file: string };
}

export interface SubscribeMsg {
  v: number;
  type: "subscribe";
  session: string;
}

export interface ActionMsg {
  v: number;
  type: "action";
  session: string;
  name: ActionName;
  force?: boolean;
}

export interface ControlMsg {
  v: number;
  type: "control";
  session: string;
  op: "play" | "pause" | "step" | "speed";
  n?: number;
  speed?: number;
}

export type ClientMsg = CreateMsg | SubscribeMsg | ActionMsg | ControlMsg;

export function parseServerMsg(line: string): ServerMsg {
  const msg = JSON.parse(line);
  if (typeof msg !== "object" || msg === null || typeof msg.type !== "string") {
    throw new Error(`not a protocol message: ${line}`);
  }
  return msg as ServerMsg;
}
