import { describe, expect, it } from "vitest";

import { ReplayBuffer, Transition } from "../src/replay.js";
import { Rng } from "../src/rng.js";

function tr(action: number): Transition {
  return {
    state: new Float32Array([action]),
    action,
    reward: 0,
    nextState: new Float32Array([action + 1]),
    done: false,
  };
}

describe("ReplayBuffer", () => {
  it("rejects non-positive capacity", () => {
    expect(() => new ReplayBuffer(0)).toThrow(/capacity/);
  });

  it("never exceeds its capacity", () => {
    const buf = new ReplayBuffer(10);
    for (let i = 0; i < 100; i++) {
      buf.push(tr(i));
      expect(buf.size).toBeLessThanOrEqual(10);
    }
    expect(buf.size).toBe(10);
  });

  it("evicts oldest-first once full", () => {
    const buf = new ReplayBuffer(3);
    for (let i = 0; i < 5; i++) {
      buf.push(tr(i));
    }
    const rng = new Rng(42);
    const seen = new Set<number>();
    for (let i = 0; i < 200; i++) {
      for (const t of buf.sample(4, rng)) {
        seen.add(t.action);
      }
    }
    expect([...seen].sort()).toEqual([2, 3, 4]);
  });

  it("throws when sampling empty", () => {
    const buf = new ReplayBuffer(3);
    expect(() => buf.sample(1, new Rng(1))).toThrow(/empty/);
  });

  it("samples with replacement, roughly uniformly", () => {
    const buf = new ReplayBuffer(4);
    for (let i = 0; i < 4; i++) {
      buf.push(tr(i));
    }
    const rng = new Rng(7);
    const counts = [0, 0, 0, 0];
    const draws = 8000;
    for (const t of buf.sample(draws, rng)) {
      counts[t.action] += 1;
    }
    for (const c of counts) {
      expect(c).toBeGreaterThan(draws / 4 - 150);
      expect(c).toBeLessThan(draws / 4 + 150);
    }
  });

  it("can sample more than it stores", () => {
    const buf = new ReplayBuffer(8);
    buf.push(tr(0));
    expect(buf.sample(5, new Rng(3)).length).toBe(5);
  });
});
