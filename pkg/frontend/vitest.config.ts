import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    testTimeout: 30_000,
    hookTimeout: 30_000,
    // the learning test drives a long training run; run files serially so
    // it gets the whole CPU
    fileParallelism: false,
  },
});
