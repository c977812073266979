/**
 * Training loop for the link-selection agent over the newline-delimited JSON
 * wire protocol. The loop owns no simulator logic: it connects to a serving
 * endpoint, resets with one seed per episode, and feeds raw state vectors to
 * the agent.
 *
 * Per-episode bookkeeping mirrors the summary CSV written by the simulator
 * CLI: f1 is the episode mean of the per-slot `sum_age` trace field and f2 is
 * the final handover count, so curves written here line up with `run`
 * summaries for the scripted baselines.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { Agent, AgentConfig } from "./agent.js";
import { epsilonAt } from "./hyperparams.js";
import { EnvClient, HelloReply } from "./protocol.js";
import { stateLength } from "./tokenize.js";

export interface EpisodeRow {
  episode: number;
  seed: number;
  reward: number;
  f1: number;
  f2: number;
  loss: number;
  epsilon: number;
}

export interface TrainOptions {
  host: string;
  port: number;
  /** Everything the agent needs except stateDim/actionCount/schema, which come from hello. */
  agent: Omit<AgentConfig, "stateDim" | "actionCount" | "schema">;
  episodes: number;
  /** Episode e resets with seed seedStart + e. */
  seedStart: number;
  onEpisode?: (row: EpisodeRow) => void;
}

export interface TrainResult {
  rows: EpisodeRow[];
  agent: Agent;
  hello: HelloReply;
}

function mean(xs: number[]): number {
  if (xs.length === 0) {
    return 0;
  }
  return xs.reduce((a, b) => a + b, 0) / xs.length;
}

/** Train an agent online against a serving endpoint. Caller disposes the returned agent. */
export async function trainAgent(opts: TrainOptions): Promise<TrainResult> {
  const client = await EnvClient.connect(opts.host, opts.port);
  try {
    const hello = await client.hello();
    const agent = new Agent({
      ...opts.agent,
      stateDim: stateLength(hello.schema),
      actionCount: hello.num_satellites,
      schema: hello.schema,
    });
    const rows: EpisodeRow[] = [];
    for (let ep = 0; ep < opts.episodes; ep++) {
      const seed = opts.seedStart + ep;
      const eps = epsilonAt(ep, { ...agent.cfg.hp, episodes: opts.episodes });
      let reply = await client.reset(seed);
      let state = Float32Array.from(reply.state);
      let visible = reply.visible_mask;
      let totalReward = 0;
      const sumAges: number[] = [];
      const losses: number[] = [];
      let f2 = 0;
      for (;;) {
        const action = agent.act(state, visible, eps);
        const out = await client.step(action);
        totalReward += out.reward;
        sumAges.push(out.record.sum_age);
        f2 = out.record.handover_count;
        const nextState = Float32Array.from(out.state);
        if (action >= 0) {
          // Hold slots (no satellite visible) have no action index to credit.
          const stats = agent.observe({
            state,
            action,
            reward: out.reward,
            nextState,
            done: out.done,
          });
          if (stats !== null) {
            losses.push(stats.loss);
          }
        }
        state = nextState;
        visible = out.visible_mask;
        if (out.done) {
          break;
        }
      }
      const row: EpisodeRow = {
        episode: ep,
        seed,
        reward: totalReward,
        f1: mean(sumAges),
        f2,
        loss: mean(losses),
        epsilon: eps,
      };
      rows.push(row);
      opts.onEpisode?.(row);
    }
    return { rows, agent, hello };
  } finally {
    client.close();
  }
}

const CURVE_COLUMNS = ["episode", "seed", "reward", "f1", "f2", "loss", "epsilon"] as const;

/** Write a learning curve as CSV, 9 significant digits to match simulator output. */
export function curveCsvText(rows: EpisodeRow[]): string {
  const lines = [CURVE_COLUMNS.join(",")];
  for (const row of rows) {
    lines.push(
      CURVE_COLUMNS.map((col) => {
        const v = row[col];
        // %.9g: 9 significant digits, trailing zeros dropped
        return Number.isInteger(v) ? String(v) : String(Number(v.toPrecision(9)));
      }).join(","),
    );
  }
  return lines.join("\n") + "\n";
}

export function writeCurveCsv(filePath: string, rows: EpisodeRow[]): void {
  fs.mkdirSync(path.dirname(filePath), { recursive: true });
  fs.writeFileSync(filePath, curveCsvText(rows));
}
