/**
 * State transformer encoder: tokens are linearly embedded, pass through L
 * layers of residual multi-head self-attention and a residual position-wise
 * FFN (GELU), and are mean-pooled into one vector.
 *
 * Residuals are plain additions (no layer normalization), so with the
 * attention and FFN weights zeroed every layer is exactly the identity.
 * Attention uses only the Q/K/V projections; head outputs are concatenated
 * without an extra output projection. A learned per-token-position embedding
 * (zero-initialized) is added after the input projection so tokens keep
 * their identity under the permutation-invariant attention.
 */
import * as tf from "@tensorflow/tfjs";

import type { SteConfig } from "./hyperparams.js";
import { Rng } from "./rng.js";

function gelu(x: tf.Tensor): tf.Tensor {
  // exact form 0.5 * x * (1 + erf(x / sqrt(2)))
  return tf.mul(tf.mul(x, 0.5), tf.add(1, tf.erf(tf.div(x, Math.SQRT2))));
}

function initMatrix(rng: Rng, rows: number, cols: number): tf.Tensor2D {
  const scale = 1 / Math.sqrt(rows);
  const data = new Float32Array(rows * cols);
  for (let i = 0; i < data.length; i++) {
    data[i] = rng.normal() * scale;
  }
  return tf.tensor2d(data, [rows, cols]);
}

/** x: [batch, n, inDim] times W: [inDim, outDim] -> [batch, n, outDim]. */
function tokenMatMul(x: tf.Tensor3D, w: tf.Variable): tf.Tensor3D {
  const [batch, n, inDim] = x.shape;
  const flat = tf.matMul(tf.reshape(x, [batch * n, inDim]), w as unknown as tf.Tensor2D);
  return tf.reshape(flat, [batch, n, w.shape[1] as number]) as tf.Tensor3D;
}

export class StateTransformerEncoder {
  readonly cfg: SteConfig;
  readonly tokenWidth: number;
  readonly maxTokens: number;
  readonly params = new Map<string, tf.Variable>();

  constructor(cfg: SteConfig, tokenWidth: number, maxTokens: number, seed = 1) {
    if (cfg.embedDim % cfg.numHeads !== 0) {
      throw new Error("embedDim must be divisible by numHeads");
    }
    this.cfg = cfg;
    this.tokenWidth = tokenWidth;
    this.maxTokens = maxTokens;
    const rng = new Rng(seed);
    this.add("embed/W", initMatrix(rng, tokenWidth, cfg.embedDim));
    this.add("embed/b", tf.zeros([cfg.embedDim]));
    this.add("pos", tf.zeros([maxTokens, cfg.embedDim]));
    for (let l = 0; l < cfg.numLayers; l++) {
      this.add(`layer${l}/Wq`, initMatrix(rng, cfg.embedDim, cfg.embedDim));
      this.add(`layer${l}/Wk`, initMatrix(rng, cfg.embedDim, cfg.embedDim));
      this.add(`layer${l}/Wv`, initMatrix(rng, cfg.embedDim, cfg.embedDim));
      this.add(`layer${l}/W1`, initMatrix(rng, cfg.embedDim, cfg.ffnDim));
      this.add(`layer${l}/b1`, tf.zeros([cfg.ffnDim]));
      this.add(`layer${l}/W2`, initMatrix(rng, cfg.ffnDim, cfg.embedDim));
      this.add(`layer${l}/b2`, tf.zeros([cfg.embedDim]));
    }
  }

  private add(name: string, init: tf.Tensor): void {
    this.params.set(name, tf.variable(init, true));
    init.dispose();
  }

  private p(name: string): tf.Variable {
    const v = this.params.get(name);
    if (!v) {
      throw new Error(`no parameter ${name}`);
    }
    return v;
  }

  get variables(): tf.Variable[] {
    return [...this.params.values()];
  }

  private msa(h: tf.Tensor3D, layer: number): tf.Tensor3D {
    const { numHeads, embedDim } = this.cfg;
    const keyDim = embedDim / numHeads;
    const [batch, n] = [h.shape[0], h.shape[1]];
    const split = (x: tf.Tensor3D) =>
      tf.transpose(tf.reshape(x, [batch, n, numHeads, keyDim]), [0, 2, 1, 3]);
    const q = split(tokenMatMul(h, this.p(`layer${layer}/Wq`)));
    const k = split(tokenMatMul(h, this.p(`layer${layer}/Wk`)));
    const v = split(tokenMatMul(h, this.p(`layer${layer}/Wv`)));
    const scores = tf.div(tf.matMul(q, k, false, true), Math.sqrt(keyDim));
    const attn = tf.softmax(scores, -1);
    const headed = tf.matMul(attn, v); // [batch, heads, n, keyDim]
    return tf.reshape(tf.transpose(headed, [0, 2, 1, 3]), [batch, n, embedDim]) as tf.Tensor3D;
  }

  private ffn(h: tf.Tensor3D, layer: number): tf.Tensor3D {
    const hidden = gelu(tf.add(tokenMatMul(h, this.p(`layer${layer}/W1`)), this.p(`layer${layer}/b1`)));
    return tf.add(
      tokenMatMul(hidden as tf.Tensor3D, this.p(`layer${layer}/W2`)),
      this.p(`layer${layer}/b2`),
    ) as tf.Tensor3D;
  }

  /** [batch, numTokens, tokenWidth] -> [batch, embedDim]. */
  encode(tokens: tf.Tensor3D): tf.Tensor2D {
    const n = tokens.shape[1];
    if (n > this.maxTokens) {
      throw new Error(`got ${n} tokens, encoder built for at most ${this.maxTokens}`);
    }
    let h = tf.add(tokenMatMul(tokens, this.p("embed/W")), this.p("embed/b")) as tf.Tensor3D;
    h = tf.add(h, tf.slice(this.p("pos"), [0, 0], [n, this.cfg.embedDim])) as tf.Tensor3D;
    for (let l = 0; l < this.cfg.numLayers; l++) {
      h = tf.add(h, this.msa(h, l)) as tf.Tensor3D;
      h = tf.add(h, this.ffn(h, l)) as tf.Tensor3D;
    }
    return tf.mean(h, 1) as tf.Tensor2D;
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
