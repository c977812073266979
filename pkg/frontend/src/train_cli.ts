/** Command line entry point: train an agent against a serving endpoint. */

import * as fs from "node:fs";
import * as path from "node:path";
import { parseArgs } from "node:util";

import { DEFAULT_DIFFUSION, DEFAULT_HYPERPARAMS, DEFAULT_STE, DEFAULT_TRUNK, Variant } from "./hyperparams.js";
import { trainAgent, writeCurveCsv } from "./train.js";

async function main(): Promise<void> {
  const { values } = parseArgs({
    options: {
      host: { type: "string", default: "127.0.0.1" },
      port: { type: "string" },
      variant: { type: "string", default: "dd3qn-as" },
      episodes: { type: "string", default: String(DEFAULT_HYPERPARAMS.episodes) },
      seed: { type: "string", default: "0" },
      out: { type: "string", default: "runs/agent" },
    },
  });
  if (values.port === undefined) {
    throw new Error("--port is required (point it at a `serve` endpoint)");
  }
  const episodes = Number(values.episodes);
  const outDir = values.out!;
  const { rows, agent } = await trainAgent({
    host: values.host!,
    port: Number(values.port),
    episodes,
    seedStart: Number(values.seed),
    agent: {
      variant: values.variant as Variant,
      hp: { ...DEFAULT_HYPERPARAMS, episodes },
      ste: DEFAULT_STE,
      diffusion: DEFAULT_DIFFUSION,
      trunkWidths: [...DEFAULT_TRUNK],
      dlpgLossWeight: 0.1,
      seed: Number(values.seed),
    },
    onEpisode: (row) => {
      console.log(
        `episode ${row.episode} seed ${row.seed} reward ${row.reward.toFixed(2)} ` +
          `f1 ${row.f1.toFixed(2)} f2 ${row.f2} eps ${row.epsilon.toFixed(3)}`,
      );
    },
  });
  fs.mkdirSync(outDir, { recursive: true });
  writeCurveCsv(path.join(outDir, "curve.csv"), rows);
  fs.writeFileSync(path.join(outDir, "checkpoint.json"), JSON.stringify(agent.saveCheckpoint()));
  agent.dispose();
  console.log(`wrote ${path.join(outDir, "curve.csv")}`);
}

main().catch((err) => {
  console.error(err instanceof Error ? err.message : err);
  process.exitCode = 1;
});
