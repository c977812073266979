import { describe, expect, it } from "vitest";

import type { SchemaField } from "../src/protocol.js";
import {
  AGE_SCALE,
  POSITION_SCALE,
  TOKEN_WIDTH,
  stateLength,
  tokenizeState,
  tokensToBatch,
} from "../src/tokenize.js";

function schemaFor(numSatellites: number, numUsers: number): SchemaField[] {
  return [
    { name: "sat_positions", shape: [numSatellites, 3], units: "m" },
    { name: "user_positions", shape: [numUsers, 3], units: "m" },
    { name: "theta", shape: [numSatellites], units: "slots" },
    { name: "delta", shape: [numSatellites], units: "slots" },
    { name: "user_age", shape: [numSatellites, numUsers], units: "slots" },
    { name: "visible_mask", shape: [numSatellites], units: "bool" },
    { name: "last_selection", shape: [1], units: "index" },
  ];
}

function structuredState(numSatellites: number, numUsers: number): Float32Array {
  const schema = schemaFor(numSatellites, numUsers);
  const state = new Float32Array(stateLength(schema));
  let k = 0;
  for (let i = 0; i < numSatellites; i++) {
    state[k++] = 1e6 * (i + 1);
    state[k++] = -2e6 * (i + 1);
    state[k++] = 5e5;
  }
  for (let j = 0; j < numUsers; j++) {
    state[k++] = 100 * j;
    state[k++] = -50 * j;
    state[k++] = 0;
  }
  for (let i = 0; i < numSatellites; i++) {
    state[k++] = i + 1; // theta
  }
  for (let i = 0; i < numSatellites; i++) {
    state[k++] = 2 * i + 1; // delta
  }
  for (let i = 0; i < numSatellites; i++) {
    for (let j = 0; j < numUsers; j++) {
      state[k++] = 10 * i + j; // user_age
    }
  }
  for (let i = 0; i < numSatellites; i++) {
    state[k++] = i % 2; // visible_mask
  }
  state[k++] = 1; // last_selection
  return state;
}

describe("tokenizeState", () => {
  it("produces one token per satellite and per user", () => {
    const schema = schemaFor(10, 10);
    const out = tokenizeState(new Float32Array(stateLength(schema)), schema);
    expect(out.tokens.length).toBe(20);
    expect(out.numSatellites).toBe(10);
    expect(out.numUsers).toBe(10);
    for (const token of out.tokens) {
      expect(token.length).toBe(TOKEN_WIDTH);
    }
  });

  it("maps the zero state to all-zero tokens", () => {
    const schema = schemaFor(4, 3);
    const out = tokenizeState(new Float32Array(stateLength(schema)), schema);
    for (const token of out.tokens) {
      for (const feature of token) {
        expect(feature).toBe(0);
      }
    }
  });

  it("fills satellite tokens with scaled position, ages, and visibility", () => {
    const schema = schemaFor(3, 2);
    const state = structuredState(3, 2);
    const out = tokenizeState(state, schema);
    const sat1 = out.tokens[1];
    expect(sat1[0]).toBeCloseTo(2e6 * POSITION_SCALE, 12);
    expect(sat1[1]).toBeCloseTo(-4e6 * POSITION_SCALE, 12);
    expect(sat1[3]).toBeCloseTo(2 * AGE_SCALE, 12); // theta_1
    expect(sat1[4]).toBeCloseTo(3 * AGE_SCALE, 12); // delta_1
    expect(sat1[5]).toBeCloseTo(((10 + 11) / 2) * AGE_SCALE, 12); // mean user age
    expect(sat1[6]).toBe(1); // visible
  });

  it("permuting two satellites permutes exactly their tokens", () => {
    const numSatellites = 4;
    const numUsers = 3;
    const schema = schemaFor(numSatellites, numUsers);
    const state = structuredState(numSatellites, numUsers);
    const swapped = Float32Array.from(state);
    const swap = (offset: number, width: number, a: number, b: number) => {
      for (let f = 0; f < width; f++) {
        const tmp = swapped[offset + a * width + f];
        swapped[offset + a * width + f] = swapped[offset + b * width + f];
        swapped[offset + b * width + f] = tmp;
      }
    };
    // swap satellites 0 and 2 in every per-satellite field
    let offset = 0;
    swap(offset, 3, 0, 2); // sat_positions
    offset += numSatellites * 3 + numUsers * 3;
    swap(offset, 1, 0, 2); // theta
    offset += numSatellites;
    swap(offset, 1, 0, 2); // delta
    offset += numSatellites;
    swap(offset, numUsers, 0, 2); // user_age rows
    offset += numSatellites * numUsers;
    swap(offset, 1, 0, 2); // visible_mask

    const base = tokenizeState(state, schema).tokens;
    const perm = tokenizeState(swapped, schema).tokens;
    expect(perm[0]).toEqual(base[2]);
    expect(perm[2]).toEqual(base[0]);
    expect(perm[1]).toEqual(base[1]);
    expect(perm[3]).toEqual(base[3]);
    // user tokens average over satellites, so they are unchanged
    for (let j = 0; j < numUsers; j++) {
      expect(perm[numSatellites + j]).toEqual(base[numSatellites + j]);
    }
  });

  it("rejects a state vector that does not match the schema", () => {
    const schema = schemaFor(3, 3);
    expect(() => tokenizeState(new Float32Array(5), schema)).toThrow(/length/);
  });

  it("rejects a schema missing a required field", () => {
    const schema = schemaFor(3, 3).filter((f) => f.name !== "delta");
    expect(() => tokenizeState(new Float32Array(stateLength(schema)), schema)).toThrow(/missing/);
  });
});

describe("tokensToBatch", () => {
  it("flattens batches row-major", () => {
    const a = [
      [1, 2, 3, 4, 5, 6, 7],
      [8, 9, 10, 11, 12, 13, 14],
    ];
    const b = [
      [15, 16, 17, 18, 19, 20, 21],
      [22, 23, 24, 25, 26, 27, 28],
    ];
    const { data, batchSize, numTokens } = tokensToBatch([a, b]);
    expect(batchSize).toBe(2);
    expect(numTokens).toBe(2);
    expect(Array.from(data)).toEqual([...a.flat(), ...b.flat()]);
  });
});
