import * as net from "node:net";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { EnvClient, ProtocolClientError, canonicalStringify, decodeReply, encodeRequest } from "../src/protocol.js";
import { ServerHandle, spawnServer } from "./helpers.js";

describe("wire encoding", () => {
  it("serializes with sorted keys and no whitespace", () => {
    expect(canonicalStringify({ b: 1, a: [2, { d: 3, c: 4 }] })).toBe('{"a":[2,{"c":4,"d":3}],"b":1}');
  });

  it("stamps requests with protocol version 1", () => {
    const line = encodeRequest("reset", { seed: 7 });
    expect(line).toBe('{"payload":{"seed":7},"protocol_version":"1","type":"reset"}');
  });

  it("round-trips its own encoding", () => {
    const line = encodeRequest("step", { action: 2 });
    const msg = decodeReply(line);
    expect(msg.type).toBe("step");
    expect(msg.protocol_version).toBe("1");
    expect(msg.payload).toEqual({ action: 2 });
  });

  it("rejects malformed replies", () => {
    expect(() => decodeReply("not json")).toThrow(ProtocolClientError);
    expect(() => decodeReply("[1,2]")).toThrow(ProtocolClientError);
    expect(() => decodeReply('{"payload":{}}')).toThrow(/type/);
  });
});

describe("live endpoint", () => {
  let server: ServerHandle;

  beforeAll(async () => {
    server = await spawnServer({
      num_satellites: 3,
      num_users: 3,
      episode_slots: 20,
      handover_penalty: "event",
    });
  }, 30_000);

  afterAll(() => {
    server?.stop();
  });

  it("handshakes with the scenario dimensions and action space", async () => {
    const client = await EnvClient.connect(server.host, server.port);
    const hello = await client.hello();
    expect(hello.protocol_version).toBe("1");
    expect(hello.num_satellites).toBe(3);
    expect(hello.num_users).toBe(3);
    expect(hello.episode_slots).toBe(20);
    expect(hello.action_space).toEqual({ kind: "discrete", low: -1, high: 2, hold: -1 });
    const names = hello.schema.map((f) => f.name);
    expect(names).toContain("sat_positions");
    expect(names).toContain("user_age");
    expect(names).toContain("visible_mask");
    client.close();
  });

  it("resets deterministically for a fixed seed", async () => {
    const client = await EnvClient.connect(server.host, server.port);
    const a = await client.reset(5);
    const b = await client.reset(5);
    const c = await client.reset(6);
    expect(a.t).toBe(0);
    expect(b.state).toEqual(a.state);
    expect(b.visible_mask).toEqual(a.visible_mask);
    expect(c.state).not.toEqual(a.state);
    client.close();
  });

  it("steps through a full episode with per-slot records", async () => {
    const client = await EnvClient.connect(server.host, server.port);
    const hello = await client.hello();
    let reply = await client.reset(3);
    let lastT = reply.t;
    for (let t = 1; t <= hello.episode_slots; t++) {
      const visible = reply.visible_mask
        .map((v, i) => (v ? i : -1))
        .filter((i) => i >= 0);
      const action = visible.length > 0 ? visible[t % visible.length] : -1;
      const out = await client.step(action);
      expect(out.t).toBe(lastT + 1);
      expect(Number.isFinite(out.reward)).toBe(true);
      expect(out.reward).toBeCloseTo(out.reward_aoi + out.reward_handover + out.reward_rate, 9);
      expect(typeof out.record.sum_age).toBe("number");
      expect(typeof out.record.handover_count).toBe("number");
      expect(out.done).toBe(t === hello.episode_slots);
      lastT = out.t;
      reply = out;
    }
    client.close();
  });

  it("answers malformed requests with an error and keeps the session alive", async () => {
    const client = await EnvClient.connect(server.host, server.port);
    await client.reset(9);
    const first = await client.step(-1);
    await expect(client.step("nonsense" as unknown as number)).rejects.toThrow(ProtocolClientError);
    const next = await client.step(-1);
    expect(next.t).toBe(first.t + 1); // the failed request did not advance time
    client.close();
  });

  it("reports unknown message types without closing the connection", async () => {
    const socket = net.createConnection({ host: server.host, port: server.port });
    await new Promise<void>((resolve, reject) => {
      socket.once("connect", () => resolve());
      socket.once("error", reject);
    });
    const reply = await new Promise<string>((resolve) => {
      let buffer = "";
      socket.on("data", (chunk) => {
        buffer += chunk.toString("utf8");
        const newline = buffer.indexOf("\n");
        if (newline >= 0) {
          resolve(buffer.slice(0, newline));
        }
      });
      socket.write('{"payload":{},"protocol_version":"1","type":"bogus"}\n');
    });
    const msg = decodeReply(reply);
    expect(msg.type).toBe("error");
    expect(String(msg.payload.error)).toMatch(/bogus|unknown|type/i);
    socket.destroy();
  });
});
