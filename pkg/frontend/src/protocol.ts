/**
 * Client side of the environment's newline-delimited JSON protocol.
 *
 * One JSON object per line; requests are hello / reset / step and each gets
 * exactly one response (hello / state / outcome / error). Version "1".
 */
import * as net from "node:net";

export const PROTOCOL_VERSION = "1";

export interface SchemaField {
  name: string;
  shape: number[];
  units: string;
}

export interface HelloReply {
  protocol_version: string;
  num_satellites: number;
  num_users: number;
  episode_slots: number;
  schema: SchemaField[];
  action_space: { kind: string; low: number; high: number; hold: number };
}

export interface StateReply {
  t: number;
  state: number[];
  visible_mask: number[];
}

export interface Outcome extends StateReply {
  reward: number;
  reward_aoi: number;
  reward_handover: number;
  reward_rate: number;
  done: boolean;
  /** The exact per-slot trace record an in-process rollout would log. */
  record: Record<string, number>;
}

export class ProtocolClientError extends Error {}

/** JSON with sorted keys and no spaces, matching the wire convention. */
export function canonicalStringify(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(canonicalStringify).join(",") + "]";
  }
  const obj = value as Record<string, unknown>;
  const parts = Object.keys(obj)
    .sort()
    .map((k) => JSON.stringify(k) + ":" + canonicalStringify(obj[k]));
  return "{" + parts.join(",") + "}";
}

export function encodeRequest(type: string, payload: Record<string, unknown>): string {
  return canonicalStringify({ type, protocol_version: PROTOCOL_VERSION, payload });
}

interface WireMessage {
  type: string;
  protocol_version: string;
  payload: Record<string, unknown>;
}

export function decodeReply(line: string): WireMessage {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch (err) {
    throw new ProtocolClientError(`reply is not valid JSON: ${line}`);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ProtocolClientError("reply must be a JSON object");
  }
  const msg = obj as WireMessage;
  if (typeof msg.type !== "string" || typeof msg.protocol_version !== "string") {
    throw new ProtocolClientError("reply missing type or protocol_version");
  }
  return msg;
}

/**
 * TCP client. Requests are serialized: one in flight at a time, which is all
 * the protocol needs (every request gets exactly one response, in order).
 */
export class EnvClient {
  private socket: net.Socket;
  private buffer = "";
  private waiting: Array<{
    resolve: (line: string) => void;
    reject: (err: Error) => void;
  }> = [];
  private closed = false;

  private constructor(socket: net.Socket) {
    this.socket = socket;
    socket.setNoDelay(true);
    socket.on("data", (chunk) => this.onData(chunk.toString("utf8")));
    socket.on("error", (err) => this.failAll(err));
    socket.on("close", () => {
      this.closed = true;
      this.failAll(new ProtocolClientError("connection closed"));
    });
  }

  static connect(host: string, port: number): Promise<EnvClient> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port }, () => {
        socket.removeListener("error", reject);
        resolve(new EnvClient(socket));
      });
      socket.once("error", reject);
    });
  }

  private onData(text: string): void {
    this.buffer += text;
    let idx: number;
    while ((idx = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, idx);
      this.buffer = this.buffer.slice(idx + 1);
      const waiter = this.waiting.shift();
      if (waiter) {
        waiter.resolve(line);
      }
    }
  }

  private failAll(err: Error): void {
    const pending = this.waiting;
    this.waiting = [];
    for (const waiter of pending) {
      waiter.reject(err);
    }
  }

  private async request(type: string, payload: Record<string, unknown>): Promise<WireMessage> {
    if (this.closed) {
      throw new ProtocolClientError("client is closed");
    }
    const line = await new Promise<string>((resolve, reject) => {
      this.waiting.push({ resolve, reject });
      this.socket.write(encodeRequest(type, payload) + "\n");
    });
    const msg = decodeReply(line);
    if (msg.type === "error") {
      throw new ProtocolClientError(String(msg.payload["error"] ?? "unknown error"));
    }
    return msg;
  }

  async hello(): Promise<HelloReply> {
    const msg = await this.request("hello", { protocol_version: PROTOCOL_VERSION });
    return msg.payload as unknown as HelloReply;
  }

  async reset(seed: number): Promise<StateReply> {
    const msg = await this.request("reset", { seed });
    return msg.payload as unknown as StateReply;
  }

  async step(action: number | null): Promise<Outcome> {
    const msg = await this.request("step", { action });
    return msg.payload as unknown as Outcome;
  }

  close(): void {
    this.closed = true;
    this.socket.end();
    this.socket.destroy();
  }
}
