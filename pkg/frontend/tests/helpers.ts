/**
 * Shared test plumbing: spawn a simulator serve endpoint from a config
 * object, run the simulator CLI for baseline summaries, and parse its CSVs.
 */
import { spawn, spawnSync, ChildProcess } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

export interface ServerHandle {
  host: string;
  port: number;
  stop: () => void;
  configPath: string;
}

/** Minimal YAML writer for the flat two-level config shape the CLI reads. */
export function toYaml(config: Record<string, unknown>): string {
  const lines: string[] = [];
  for (const [key, value] of Object.entries(config)) {
    if (value !== null && typeof value === "object") {
      lines.push(`${key}:`);
      for (const [inner, v] of Object.entries(value as Record<string, unknown>)) {
        lines.push(`  ${inner}: ${JSON.stringify(v)}`);
      }
    } else {
      lines.push(`${key}: ${JSON.stringify(value)}`);
    }
  }
  return lines.join("\n") + "\n";
}

export function writeTempConfig(config: Record<string, unknown>): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "agent-test-"));
  const file = path.join(dir, "config.yaml");
  fs.writeFileSync(file, toYaml(config));
  return file;
}

/**
 * Start `sagin-aoi serve` on an ephemeral port and wait for its
 * "serving protocol 1 on HOST:PORT" line.
 */
export function spawnServer(simConfig: Record<string, unknown>): Promise<ServerHandle> {
  const configPath = writeTempConfig({ sim: simConfig, bind: "127.0.0.1:0" });
  const child: ChildProcess = spawn("sagin-aoi", ["serve", "--config", configPath], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  return new Promise((resolve, reject) => {
    let out = "";
    let err = "";
    const timer = setTimeout(() => {
      child.kill();
      reject(new Error(`server did not announce its endpoint; stderr: ${err}`));
    }, 20_000);
    child.stdout!.on("data", (chunk: Buffer) => {
      out += chunk.toString("utf8");
      const match = out.match(/serving protocol 1 on ([\d.]+):(\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve({
          host: match[1],
          port: Number(match[2]),
          configPath,
          stop: () => child.kill(),
        });
      }
    });
    child.stderr!.on("data", (chunk: Buffer) => {
      err += chunk.toString("utf8");
    });
    child.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited early (code ${code}); stderr: ${err}`));
    });
  });
}

/** Run the simulator CLI to completion; throws on nonzero exit. */
export function runCli(args: string[]): string {
  const result = spawnSync("sagin-aoi", args, { encoding: "utf8", timeout: 300_000 });
  if (result.status !== 0) {
    throw new Error(`sagin-aoi ${args.join(" ")} failed (${result.status}): ${result.stderr}`);
  }
  return result.stdout;
}

/** Parse a CSV with a header row into one record per line, numbers where possible. */
export function readCsv(file: string): Array<Record<string, number | string>> {
  const text = fs.readFileSync(file, "utf8").trim();
  const [header, ...rows] = text.split("\n");
  const columns = header.split(",");
  return rows.map((row) => {
    const out: Record<string, number | string> = {};
    row.split(",").forEach((cell, i) => {
      const num = Number(cell);
      out[columns[i]] = Number.isFinite(num) && cell !== "" ? num : cell;
    });
    return out;
  });
}

/**
 * Baseline episode summaries from the simulator's own `run` command:
 * episodes with consecutive seeds starting at `seed`.
 */
export function runBaseline(
  simConfig: Record<string, unknown>,
  policy: string,
  seed: number,
  episodes: number,
): Array<Record<string, number | string>> {
  const configPath = writeTempConfig({ sim: simConfig });
  const outDir = path.join(path.dirname(configPath), `${policy}-${seed}`);
  runCli([
    "run",
    "--config",
    configPath,
    "--policy",
    policy,
    "--seed",
    String(seed),
    "--episodes",
    String(episodes),
    "--out",
    outDir,
  ]);
  return readCsv(path.join(outDir, "summary.csv"));
}

export function mean(xs: number[]): number {
  return xs.reduce((a, b) => a + b, 0) / xs.length;
}

export function sampleVariance(xs: number[]): number {
  const m = mean(xs);
  return xs.reduce((acc, x) => acc + (x - m) * (x - m), 0) / (xs.length - 1);
}

/** The toy scenario used by the protocol and learning tests. */
export const TOY_SIM: Record<string, unknown> = {
  num_satellites: 3,
  num_users: 3,
  episode_slots: 100,
  handover_penalty: "event",
  reward_handover_weight: 1.0,
};
