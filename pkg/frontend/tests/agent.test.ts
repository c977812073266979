import { describe, expect, it } from "vitest";

import { Agent, AgentConfig } from "../src/agent.js";
import { DEFAULT_DIFFUSION, DEFAULT_HYPERPARAMS, Variant, variantFlags, epsilonAt } from "../src/hyperparams.js";
import type { SchemaField } from "../src/protocol.js";
import { Rng } from "../src/rng.js";
import { stateLength } from "../src/tokenize.js";

const SCHEMA: SchemaField[] = [
  { name: "sat_positions", shape: [3, 3], units: "m" },
  { name: "user_positions", shape: [2, 3], units: "m" },
  { name: "theta", shape: [3], units: "slots" },
  { name: "delta", shape: [3], units: "slots" },
  { name: "user_age", shape: [3, 2], units: "slots" },
  { name: "visible_mask", shape: [3], units: "bool" },
  { name: "last_selection", shape: [1], units: "index" },
];
const STATE_DIM = stateLength(SCHEMA);

function makeAgent(variant: Variant, overrides: Partial<AgentConfig> = {}): Agent {
  return new Agent({
    variant,
    stateDim: STATE_DIM,
    actionCount: 3,
    schema: SCHEMA,
    hp: { ...DEFAULT_HYPERPARAMS, batchSize: 8, policyUpdateEvery: 4, bufferCapacity: 64 },
    ste: { numLayers: 1, numHeads: 2, embedDim: 8, ffnDim: 16 },
    diffusion: { ...DEFAULT_DIFFUSION, promptDim: 4, actionEmbedDim: 4, timeEmbedDim: 4, hiddenDim: 8 },
    trunkWidths: [16],
    dlpgLossWeight: 0.1,
    seed: 5,
    ...overrides,
  });
}

function randomState(rng: Rng): Float32Array {
  return Float32Array.from({ length: STATE_DIM }, () => rng.normal());
}

describe("variant wiring", () => {
  it("enables exactly the advertised mechanisms", () => {
    expect(variantFlags("dqn")).toEqual({ double: false, dueling: false, ste: false, dlpg: false });
    expect(variantFlags("ddqn")).toEqual({ double: true, dueling: false, ste: false, dlpg: false });
    expect(variantFlags("d3qn")).toEqual({ double: true, dueling: true, ste: false, dlpg: false });
    expect(variantFlags("dd3qn-as")).toEqual({ double: true, dueling: true, ste: true, dlpg: true });
  });

  it("sizes the Q input by encoder and prompt choices", () => {
    const dqn = makeAgent("dqn");
    expect(dqn.qInputDim()).toBe(STATE_DIM);
    dqn.dispose();
    const full = makeAgent("dd3qn-as");
    expect(full.qInputDim()).toBe(8 + 4); // embedDim + promptDim
    full.dispose();
  });

  it("requires a schema for transformer variants", () => {
    expect(() => makeAgent("dd3qn-as", { schema: undefined })).toThrow(/schema/);
  });
});

describe("acting", () => {
  it("only ever selects visible satellites", () => {
    const agent = makeAgent("dqn");
    const rng = new Rng(11);
    for (let i = 0; i < 50; i++) {
      const a = agent.act(randomState(rng), [0, 1, 0], 1); // fully random
      expect(a).toBe(1);
    }
    for (let i = 0; i < 50; i++) {
      const a = agent.act(randomState(rng), [1, 0, 1], 0.5);
      expect([0, 2]).toContain(a);
    }
    agent.dispose();
  });

  it("holds (-1) when nothing is visible", () => {
    const agent = makeAgent("d3qn");
    expect(agent.act(randomState(new Rng(2)), [0, 0, 0], 0)).toBe(-1);
    agent.dispose();
  });

  it("is greedy over Q values at epsilon = 0", () => {
    const agent = makeAgent("dqn");
    const state = randomState(new Rng(31));
    const q = agent.qValuesFor(state);
    const greedy = agent.act(state, [1, 1, 1], 0);
    expect(q[greedy]).toBe(Math.max(...q));
    agent.dispose();
  });
});

describe("epsilon schedule", () => {
  it("decays linearly to the floor over the first fifth of training", () => {
    const hp = { ...DEFAULT_HYPERPARAMS, episodes: 100 };
    expect(epsilonAt(0, hp)).toBe(1);
    expect(epsilonAt(10, hp)).toBeCloseTo(0.525, 9);
    expect(epsilonAt(20, hp)).toBeCloseTo(0.05, 9);
    expect(epsilonAt(99, hp)).toBeCloseTo(0.05, 9);
  });
});

describe("training cadence", () => {
  it("runs a gradient step every policyUpdateEvery steps once a batch exists", () => {
    const agent = makeAgent("dqn");
    const rng = new Rng(17);
    const stats: Array<boolean> = [];
    for (let i = 0; i < 24; i++) {
      const s = agent.observe({
        state: randomState(rng),
        action: rng.int(3),
        reward: rng.normal(),
        nextState: randomState(rng),
        done: false,
      });
      stats.push(s !== null);
    }
    // batchSize 8, every 4 steps: first possible update is step 12 (index 11)
    expect(stats.slice(0, 11).every((t) => !t)).toBe(true);
    expect(stats[11]).toBe(true);
    expect(stats[15]).toBe(true);
    expect(stats[12]).toBe(false);
    agent.dispose();
  });

  it("reports finite losses for every variant", () => {
    for (const variant of ["dqn", "ddqn", "d3qn", "dd3qn-as"] as Variant[]) {
      const agent = makeAgent(variant);
      const rng = new Rng(23);
      let last: { loss: number; tdLoss: number; dlpgLoss: number } | null = null;
      for (let i = 0; i < 16; i++) {
        const s = agent.observe({
          state: randomState(rng),
          action: rng.int(3),
          reward: rng.normal(),
          nextState: randomState(rng),
          done: i === 15,
        });
        if (s) {
          last = s;
        }
      }
      expect(last).not.toBeNull();
      expect(Number.isFinite(last!.loss)).toBe(true);
      expect(Number.isFinite(last!.tdLoss)).toBe(true);
      if (variant === "dd3qn-as") {
        expect(last!.dlpgLoss).toBeGreaterThan(0);
        expect(last!.loss).toBeCloseTo(last!.tdLoss + 0.1 * last!.dlpgLoss, 4);
      } else {
        expect(last!.dlpgLoss).toBe(0);
      }
      agent.dispose();
    }
  });
});

describe("checkpointing", () => {
  it("round-trips the full dd3qn-as parameter set", () => {
    const a = makeAgent("dd3qn-as");
    const rng = new Rng(41);
    for (let i = 0; i < 16; i++) {
      a.observe({
        state: randomState(rng),
        action: rng.int(3),
        reward: rng.normal(),
        nextState: randomState(rng),
        done: false,
      });
    }
    const b = makeAgent("dd3qn-as", { seed: 1000 });
    b.loadCheckpoint(JSON.parse(JSON.stringify(a.saveCheckpoint())));
    const probe = randomState(new Rng(55));
    expect(b.qValuesFor(probe)).toEqual(a.qValuesFor(probe));
    a.dispose();
    b.dispose();
  });

  it("round-trips plain dqn weights", () => {
    const a = makeAgent("dqn");
    const b = makeAgent("dqn", { seed: 999 });
    b.loadCheckpoint(a.saveCheckpoint());
    const probe = randomState(new Rng(3));
    expect(b.qValuesFor(probe)).toEqual(a.qValuesFor(probe));
    a.dispose();
    b.dispose();
  });
});
