import { describe, expect, it } from "vitest";

import { curveCsvText } from "../src/train.js";

describe("learning curve CSV", () => {
  it("writes a header and 9-significant-digit values", () => {
    const text = curveCsvText([
      { episode: 0, seed: 5, reward: 123.456789123, f1: 31.5, f2: 12, loss: 0.000123456789, epsilon: 1 },
    ]);
    const [header, row] = text.trim().split("\n");
    expect(header).toBe("episode,seed,reward,f1,f2,loss,epsilon");
    expect(row).toBe("0,5,123.456789,31.5,12,0.000123456789,1");
  });

  it("keeps one row per episode in order", () => {
    const rows = [0, 1, 2].map((e) => ({
      episode: e,
      seed: e,
      reward: e + 0.5,
      f1: 0,
      f2: 0,
      loss: 0,
      epsilon: 0.5,
    }));
    const lines = curveCsvText(rows).trim().split("\n");
    expect(lines.length).toBe(4);
    expect(lines[2].startsWith("1,1,1.5")).toBe(true);
  });
});
