/**
 * Diffusion latent-prompt module: a linear beta schedule, the forward
 * noising process, a small conditional denoiser, the noise-reconstruction
 * training loss, and the iterative reverse sampler that produces the latent
 * prompt concatenated to the encoded state.
 */
import * as tf from "@tensorflow/tfjs";

import { Rng } from "./rng.js";

export interface Schedule {
  /** beta_m for m = 1..M at indices 0..M-1. */
  betas: number[];
  /** alphaBar_m = prod_{i<=m} (1 - beta_i). */
  alphaBars: number[];
  /** Posterior noise scale; sigma_1 = 0 so the last reverse step is deterministic. */
  sigmas: number[];
}

/** Linear schedule from betaStart to betaEnd over `steps` values. */
export function makeSchedule(steps: number, betaStart: number, betaEnd: number): Schedule {
  if (steps < 1) {
    throw new Error("need at least one diffusion step");
  }
  const betas: number[] = [];
  for (let m = 0; m < steps; m++) {
    const frac = steps === 1 ? 1 : m / (steps - 1);
    betas.push(betaStart + (betaEnd - betaStart) * frac);
  }
  return scheduleFromBetas(betas);
}

export function scheduleFromBetas(betas: number[]): Schedule {
  const alphaBars: number[] = [];
  const sigmas: number[] = [];
  let alphaBar = 1;
  let prevAlphaBar = 1;
  for (const beta of betas) {
    if (beta < 0 || beta >= 1) {
      throw new Error(`beta must lie in [0, 1), got ${beta}`);
    }
    prevAlphaBar = alphaBar;
    alphaBar *= 1 - beta;
    alphaBars.push(alphaBar);
    const variance = alphaBar < 1 ? (beta * (1 - prevAlphaBar)) / (1 - alphaBar) : 0;
    sigmas.push(Math.sqrt(variance));
  }
  return { betas, alphaBars, sigmas };
}

/** Forward noising z_m = sqrt(alphaBar_m) z0 + sqrt(1 - alphaBar_m) eps; m is 1-based. */
export function noisify(z0: number[], eps: number[], m: number, schedule: Schedule): number[] {
  const alphaBar = schedule.alphaBars[m - 1];
  const a = Math.sqrt(alphaBar);
  const b = Math.sqrt(1 - alphaBar);
  return z0.map((z, i) => a * z + b * eps[i]);
}

/** Sinusoidal embedding of the (1-based) diffusion step. */
export function timeEmbedding(m: number, dim: number): number[] {
  const out = new Array<number>(dim);
  for (let k = 0; k < dim; k += 2) {
    const freq = 1 / Math.pow(10000, k / dim);
    out[k] = Math.sin(m * freq);
    if (k + 1 < dim) {
      out[k + 1] = Math.cos(m * freq);
    }
  }
  return out;
}

export interface DenoiserConfig {
  promptDim: number;
  /** Dimension of the conditioning vector (encoded state plus action embedding). */
  condDim: number;
  timeEmbedDim: number;
  hiddenDim: number;
}

/** Two-layer MLP eps_theta(z_m, m | cond). */
export class Denoiser {
  readonly cfg: DenoiserConfig;
  readonly params = new Map<string, tf.Variable>();

  constructor(cfg: DenoiserConfig, seed = 2) {
    this.cfg = cfg;
    const rng = new Rng(seed);
    const inDim = cfg.promptDim + cfg.timeEmbedDim + cfg.condDim;
    this.add("W1", this.init(rng, inDim, cfg.hiddenDim));
    this.add("b1", tf.zeros([cfg.hiddenDim]));
    this.add("W2", this.init(rng, cfg.hiddenDim, cfg.promptDim));
    this.add("b2", tf.zeros([cfg.promptDim]));
  }

  private init(rng: Rng, rows: number, cols: number): tf.Tensor2D {
    const scale = 1 / Math.sqrt(rows);
    const data = new Float32Array(rows * cols);
    for (let i = 0; i < data.length; i++) {
      data[i] = rng.normal() * scale;
    }
    return tf.tensor2d(data, [rows, cols]);
  }

  private add(name: string, init: tf.Tensor): void {
    this.params.set(name, tf.variable(init, true));
    init.dispose();
  }

  get variables(): tf.Variable[] {
    return [...this.params.values()];
  }

  private p(name: string): tf.Variable {
    return this.params.get(name)!;
  }

  /**
   * z: [batch, promptDim]; m: 1-based step per batch row; cond: [batch, condDim].
   * Returns predicted noise [batch, promptDim].
   */
  forward(z: tf.Tensor2D, m: number[], cond: tf.Tensor2D): tf.Tensor2D {
    const batch = z.shape[0];
    const timeData = new Float32Array(batch * this.cfg.timeEmbedDim);
    for (let i = 0; i < batch; i++) {
      timeData.set(timeEmbedding(m[i], this.cfg.timeEmbedDim), i * this.cfg.timeEmbedDim);
    }
    const time = tf.tensor2d(timeData, [batch, this.cfg.timeEmbedDim]);
    const x = tf.concat([z, time, cond], 1);
    const hidden = tf.relu(tf.add(tf.matMul(x, this.p("W1") as unknown as tf.Tensor2D), this.p("b1")));
    return tf.add(tf.matMul(hidden as tf.Tensor2D, this.p("W2") as unknown as tf.Tensor2D), this.p("b2")) as tf.Tensor2D;
  }

  saveWeights(): Record<string, number[]> {
    const out: Record<string, number[]> = {};
    for (const [name, variable] of this.params) {
      out[name] = Array.from(variable.dataSync());
    }
    return out;
  }

  loadWeights(weights: Record<string, number[]>): void {
    for (const [name, variable] of this.params) {
      const data = weights[name];
      if (!data) {
        throw new Error(`checkpoint missing denoiser/${name}`);
      }
      const next = tf.tensor(data, variable.shape as number[]);
      variable.assign(next);
      next.dispose();
    }
  }

  dispose(): void {
    for (const variable of this.params.values()) {
      variable.dispose();
    }
    this.params.clear();
  }
}

/**
 * Noise-reconstruction loss given the sampled quantities: mean over the batch
 * of || eps - eps_theta(z_m, m | cond) ||^2.
 */
export function dlpgLossGiven(
  denoiser: Denoiser,
  schedule: Schedule,
  z0: tf.Tensor2D,
  eps: tf.Tensor2D,
  m: number[],
  cond: tf.Tensor2D,
): tf.Scalar {
  const batch = z0.shape[0];
  const a = m.map((step) => Math.sqrt(schedule.alphaBars[step - 1]));
  const b = m.map((step) => Math.sqrt(1 - schedule.alphaBars[step - 1]));
  const aCol = tf.tensor2d(a, [batch, 1]);
  const bCol = tf.tensor2d(b, [batch, 1]);
  const zm = tf.add(tf.mul(z0, aCol), tf.mul(eps, bCol)) as tf.Tensor2D;
  const predicted = denoiser.forward(zm, m, cond);
  const sq = tf.sum(tf.square(tf.sub(eps, predicted)), 1);
  return tf.mean(sq) as tf.Scalar;
}

/** One training-phase draw: eps, m, z0 all sampled fresh, then the loss above. */
export function dlpgTrainLoss(
  denoiser: Denoiser,
  schedule: Schedule,
  cond: tf.Tensor2D,
  rng: Rng,
): tf.Scalar {
  const batch = cond.shape[0];
  const promptDim = denoiser.cfg.promptDim;
  const steps = schedule.betas.length;
  const eps = tf.tensor2d(rng.normals(batch * promptDim), [batch, promptDim]);
  const z0 = tf.tensor2d(rng.normals(batch * promptDim), [batch, promptDim]);
  const m = Array.from({ length: batch }, () => 1 + rng.int(steps));
  return dlpgLossGiven(denoiser, schedule, z0, eps, m, cond);
}

/**
 * Reverse sampler: z_M ~ N(0, I), then for m = M..1
 * z_{m-1} = (z_m - beta_m / sqrt(1 - alphaBar_m) * eps_hat) / sqrt(1 - beta_m)
 *           + sigma_m w.
 * Returns z_0 as plain data; the sampling path carries no gradient.
 */
export function dlpgSample(
  denoiser: Denoiser,
  schedule: Schedule,
  cond: tf.Tensor2D,
  rng: Rng,
): Float32Array {
  const batch = cond.shape[0];
  const promptDim = denoiser.cfg.promptDim;
  const steps = schedule.betas.length;
  return tf.tidy(() => {
    let z = tf.tensor2d(rng.normals(batch * promptDim), [batch, promptDim]);
    for (let m = steps; m >= 1; m--) {
      const beta = schedule.betas[m - 1];
      const alphaBar = schedule.alphaBars[m - 1];
      const sigma = schedule.sigmas[m - 1];
      const epsHat = denoiser.forward(z, Array(batch).fill(m), cond);
      const coeff = 1 - alphaBar > 0 ? beta / Math.sqrt(1 - alphaBar) : 0;
      let next = tf.div(tf.sub(z, tf.mul(epsHat, coeff)), Math.sqrt(1 - beta)) as tf.Tensor2D;
      if (sigma > 0) {
        const w = tf.tensor2d(rng.normals(batch * promptDim), [batch, promptDim]);
        next = tf.add(next, tf.mul(w, sigma)) as tf.Tensor2D;
      }
      z = next;
    }
    return z.dataSync() as Float32Array;
  });
}
