/**
 * Turn the environment's flat state vector into a token sequence: one token
 * per satellite (position, own age, relay age, mean user age, visibility bit)
 * and one per user (position, mean age over satellites), all padded to a
 * common width.
 *
 * Features are scaled to O(1): positions by 1e-7 (orbit radii are ~1e6-1e7 m),
 * ages by 1e-2 (the age cap is 100 slots). Scaling is linear, so a zero state
 * still maps to all-zero tokens.
 */
import type { SchemaField } from "./protocol.js";

export const TOKEN_WIDTH = 7;
export const POSITION_SCALE = 1e-7;
export const AGE_SCALE = 1e-2;

export interface TokenizedState {
  /** numSatellites + numUsers rows of TOKEN_WIDTH features. */
  tokens: number[][];
  numSatellites: number;
  numUsers: number;
}

function fieldSize(field: SchemaField): number {
  return field.shape.reduce((a, b) => a * b, 1);
}

/** Offsets of each schema field in the flat vector, by name. */
export function schemaOffsets(schema: SchemaField[]): Map<string, { offset: number; shape: number[] }> {
  const out = new Map<string, { offset: number; shape: number[] }>();
  let offset = 0;
  for (const field of schema) {
    out.set(field.name, { offset, shape: field.shape });
    offset += fieldSize(field);
  }
  return out;
}

export function stateLength(schema: SchemaField[]): number {
  return schema.reduce((acc, f) => acc + fieldSize(f), 0);
}

export function tokenizeState(state: ArrayLike<number>, schema: SchemaField[]): TokenizedState {
  const expected = stateLength(schema);
  if (state.length !== expected) {
    throw new Error(`state length ${state.length} does not match schema (${expected})`);
  }
  const fields = schemaOffsets(schema);
  const satPos = fields.get("sat_positions");
  const userPos = fields.get("user_positions");
  const theta = fields.get("theta");
  const delta = fields.get("delta");
  const userAge = fields.get("user_age");
  const visible = fields.get("visible_mask");
  if (!satPos || !userPos || !theta || !delta || !userAge || !visible) {
    throw new Error("schema is missing a required field");
  }
  const numSatellites = satPos.shape[0];
  const numUsers = userPos.shape[0];

  const tokens: number[][] = [];
  for (let i = 0; i < numSatellites; i++) {
    let meanAge = 0;
    for (let j = 0; j < numUsers; j++) {
      meanAge += state[userAge.offset + i * numUsers + j];
    }
    meanAge /= numUsers;
    tokens.push([
      state[satPos.offset + 3 * i] * POSITION_SCALE,
      state[satPos.offset + 3 * i + 1] * POSITION_SCALE,
      state[satPos.offset + 3 * i + 2] * POSITION_SCALE,
      state[theta.offset + i] * AGE_SCALE,
      state[delta.offset + i] * AGE_SCALE,
      meanAge * AGE_SCALE,
      state[visible.offset + i],
    ]);
  }
  for (let j = 0; j < numUsers; j++) {
    let meanAge = 0;
    for (let i = 0; i < numSatellites; i++) {
      meanAge += state[userAge.offset + i * numUsers + j];
    }
    meanAge /= numSatellites;
    tokens.push([
      state[userPos.offset + 3 * j] * POSITION_SCALE,
      state[userPos.offset + 3 * j + 1] * POSITION_SCALE,
      state[userPos.offset + 3 * j + 2] * POSITION_SCALE,
      meanAge * AGE_SCALE,
      0,
      0,
      0,
    ]);
  }
  return { tokens, numSatellites, numUsers };
}

/** Flatten a batch of token sequences into one Float32Array for the encoder. */
export function tokensToBatch(batches: number[][][]): {
  data: Float32Array;
  batchSize: number;
  numTokens: number;
} {
  const batchSize = batches.length;
  const numTokens = batches[0].length;
  const data = new Float32Array(batchSize * numTokens * TOKEN_WIDTH);
  let k = 0;
  for (const tokens of batches) {
    for (const token of tokens) {
      for (let f = 0; f < TOKEN_WIDTH; f++) {
        data[k++] = token[f];
      }
    }
  }
  return { data, batchSize, numTokens };
}
