/**
 * Dueling double Q-machinery: an MLP trunk with either a plain action head
 * or dueling value/advantage heads combined as Q = V + A - mean(A), TD
 * target construction with or without double-Q decoupling, and the soft
 * target update.
 */
import * as tf from "@tensorflow/tfjs";

import { Rng } from "./rng.js";

export interface QNetworkConfig {
  inputDim: number;
  actionCount: number;
  trunkWidths: number[];
  dueling: boolean;
}

export class QNetwork {
  readonly cfg: QNetworkConfig;
  readonly params = new Map<string, tf.Variable>();

  constructor(cfg: QNetworkConfig, seed = 3) {
    this.cfg = cfg;
    const rng = new Rng(seed);
    let prev = cfg.inputDim;
    cfg.trunkWidths.forEach((width, i) => {
      this.add(`trunk${i}/W`, this.init(rng, prev, width));
      this.add(`trunk${i}/b`, tf.zeros([width]));
      prev = width;
    });
    if (cfg.dueling) {
      this.add("value/W", this.init(rng, prev, 1));
      this.add("value/b", tf.zeros([1]));
      this.add("adv/W", this.init(rng, prev, cfg.actionCount));
      this.add("adv/b", tf.zeros([cfg.actionCount]));
    } else {
      this.add("head/W", this.init(rng, prev, cfg.actionCount));
      this.add("head/b", tf.zeros([cfg.actionCount]));
    }
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

  private p(name: string): tf.Variable {
    return this.params.get(name)!;
  }

  get variables(): tf.Variable[] {
    return [...this.params.values()];
  }

  /** x: [batch, inputDim] -> Q values [batch, actionCount]. */
  forward(x: tf.Tensor2D): tf.Tensor2D {
    let h: tf.Tensor2D = x;
    for (let i = 0; i < this.cfg.trunkWidths.length; i++) {
      h = tf.relu(
        tf.add(tf.matMul(h, this.p(`trunk${i}/W`) as unknown as tf.Tensor2D), this.p(`trunk${i}/b`)),
      ) as tf.Tensor2D;
    }
    if (!this.cfg.dueling) {
      return tf.add(
        tf.matMul(h, this.p("head/W") as unknown as tf.Tensor2D),
        this.p("head/b"),
      ) as tf.Tensor2D;
    }
    const value = tf.add(tf.matMul(h, this.p("value/W") as unknown as tf.Tensor2D), this.p("value/b"));
    const adv = tf.add(tf.matMul(h, this.p("adv/W") as unknown as tf.Tensor2D), this.p("adv/b"));
    const centered = tf.sub(adv, tf.mean(adv, 1, true));
    return tf.add(value, centered) as tf.Tensor2D;
  }

  /** Convenience: Q values for one input row as a plain array. */
  qValues(row: ArrayLike<number>): number[] {
    return tf.tidy(() => {
      const x = tf.tensor2d(Array.from(row), [1, this.cfg.inputDim]);
      return Array.from(this.forward(x).dataSync());
    });
  }

  copyFrom(other: QNetwork): void {
    for (const [name, variable] of this.params) {
      variable.assign(other.p(name));
    }
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
        throw new Error(`checkpoint missing ${name}`);
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

/** theta_target' = tau * theta + (1 - tau) * theta_target, elementwise. */
export function softUpdate(online: QNetwork, target: QNetwork, tau: number): void {
  softUpdateParams(online.params, target.params, tau);
}

export function softUpdateParams(
  online: Map<string, tf.Variable>,
  target: Map<string, tf.Variable>,
  tau: number,
): void {
  if (tau <= 0 || tau > 1) {
    throw new Error(`tau must lie in (0, 1], got ${tau}`);
  }
  tf.tidy(() => {
    for (const [name, targetVar] of target) {
      const onlineVar = online.get(name);
      if (!onlineVar) {
        throw new Error(`online network has no parameter ${name}`);
      }
      targetVar.assign(tf.add(tf.mul(onlineVar, tau), tf.mul(targetVar, 1 - tau)));
    }
  });
}

function argmax(row: number[]): number {
  let best = 0;
  for (let i = 1; i < row.length; i++) {
    if (row[i] > row[best]) {
      best = i;
    }
  }
  return best;
}

/**
 * y = r for terminal transitions, else
 * y = r + gamma * Q_target(s', argmax_a Q_online(s', a))  (double)
 * y = r + gamma * max_a Q_target(s', a)                   (plain)
 */
export function tdTargets(
  rewards: number[],
  dones: boolean[],
  gamma: number,
  nextOnlineQ: number[][],
  nextTargetQ: number[][],
  double: boolean,
): number[] {
  return rewards.map((r, i) => {
    if (dones[i]) {
      return r;
    }
    const targetRow = nextTargetQ[i];
    const bootstrap = double ? targetRow[argmax(nextOnlineQ[i])] : targetRow[argmax(targetRow)];
    return r + gamma * bootstrap;
  });
}
