/**
 * The learning agent: a state encoder (transformer or raw vector), an
 * optional diffusion latent prompt, dueling double Q-networks, replay, and
 * the gradient step combining the TD loss with the weighted
 * noise-reconstruction loss.
 *
 * Variants: dqn (plain targets, plain head), ddqn (double targets), d3qn
 * (double + dueling), dd3qn-as (double + dueling + transformer encoder +
 * diffusion prompt). Acting always feeds zeros in the prompt slot; sampled
 * prompts only enter the Q inputs of gradient updates, so inference needs
 * neither the denoiser nor its sampler.
 */
import * as tf from "@tensorflow/tfjs";

import {
  Denoiser,
  Schedule,
  dlpgSample,
  dlpgTrainLoss,
  makeSchedule,
} from "./diffusion.js";
import {
  AgentHyperparams,
  DiffusionConfig,
  SteConfig,
  Variant,
  VariantFlags,
  variantFlags,
} from "./hyperparams.js";
import { QNetwork, softUpdate, tdTargets } from "./networks.js";
import type { SchemaField } from "./protocol.js";
import { ReplayBuffer, Transition } from "./replay.js";
import { Rng } from "./rng.js";
import { StateTransformerEncoder } from "./ste.js";
import { TOKEN_WIDTH, tokenizeState, tokensToBatch } from "./tokenize.js";

export interface AgentConfig {
  variant: Variant;
  stateDim: number;
  actionCount: number;
  /** Required when the variant uses the transformer encoder. */
  schema?: SchemaField[];
  hp: AgentHyperparams;
  ste: SteConfig;
  diffusion: DiffusionConfig;
  trunkWidths: number[];
  dlpgLossWeight: number;
  seed: number;
}

export interface TrainStepStats {
  loss: number;
  tdLoss: number;
  dlpgLoss: number;
}

export class Agent {
  readonly cfg: AgentConfig;
  readonly flags: VariantFlags;
  readonly buffer: ReplayBuffer;
  readonly online: QNetwork;
  readonly target: QNetwork;
  readonly encoder: StateTransformerEncoder | null;
  readonly denoiser: Denoiser | null;
  readonly schedule: Schedule | null;
  readonly actionEmbed: tf.Variable | null;
  private optimizer: tf.Optimizer;
  private rng: Rng;
  private envSteps = 0;
  private trainSteps = 0;

  constructor(cfg: AgentConfig) {
    this.cfg = cfg;
    this.flags = variantFlags(cfg.variant);
    this.rng = new Rng(cfg.seed);
    this.buffer = new ReplayBuffer(cfg.hp.bufferCapacity);

    if (this.flags.ste) {
      if (!cfg.schema) {
        throw new Error("transformer variants need the state schema from the handshake");
      }
      const probe = tokenizeState(new Float32Array(cfg.stateDim), cfg.schema);
      this.encoder = new StateTransformerEncoder(
        cfg.ste,
        TOKEN_WIDTH,
        probe.tokens.length,
        cfg.seed + 1,
      );
    } else {
      this.encoder = null;
    }

    if (this.flags.dlpg) {
      this.schedule = makeSchedule(cfg.hp.denoisingSteps, cfg.diffusion.betaStart, cfg.diffusion.betaEnd);
      this.denoiser = new Denoiser(
        {
          promptDim: cfg.diffusion.promptDim,
          condDim: cfg.ste.embedDim + cfg.diffusion.actionEmbedDim,
          timeEmbedDim: cfg.diffusion.timeEmbedDim,
          hiddenDim: cfg.diffusion.hiddenDim,
        },
        cfg.seed + 2,
      );
      const embedRng = new Rng(cfg.seed + 3);
      const data = new Float32Array(cfg.actionCount * cfg.diffusion.actionEmbedDim);
      for (let i = 0; i < data.length; i++) {
        data[i] = embedRng.normal() * 0.1;
      }
      const init = tf.tensor2d(data, [cfg.actionCount, cfg.diffusion.actionEmbedDim]);
      this.actionEmbed = tf.variable(init, true);
      init.dispose();
    } else {
      this.schedule = null;
      this.denoiser = null;
      this.actionEmbed = null;
    }

    const qInputDim = this.qInputDim();
    this.online = new QNetwork(
      { inputDim: qInputDim, actionCount: cfg.actionCount, trunkWidths: cfg.trunkWidths, dueling: this.flags.dueling },
      cfg.seed + 4,
    );
    this.target = new QNetwork(
      { inputDim: qInputDim, actionCount: cfg.actionCount, trunkWidths: cfg.trunkWidths, dueling: this.flags.dueling },
      cfg.seed + 4,
    );
    this.target.copyFrom(this.online);
    this.optimizer = tf.train.adam(cfg.hp.learningRate);
  }

  qInputDim(): number {
    const encoded = this.flags.ste ? this.cfg.ste.embedDim : this.cfg.stateDim;
    return encoded + (this.flags.dlpg ? this.cfg.diffusion.promptDim : 0);
  }

  /** Encoded batch [batch, embedDim] (transformer) or the raw states. */
  private encodeBatch(states: Float32Array[]): tf.Tensor2D {
    if (!this.encoder) {
      const dim = this.cfg.stateDim;
      const data = new Float32Array(states.length * dim);
      states.forEach((s, i) => data.set(s, i * dim));
      return tf.tensor2d(data, [states.length, dim]);
    }
    const tokenized = states.map((s) => tokenizeState(s, this.cfg.schema!).tokens);
    const { data, batchSize, numTokens } = tokensToBatch(tokenized);
    const tokens = tf.tensor3d(data, [batchSize, numTokens, TOKEN_WIDTH]);
    return this.encoder.encode(tokens);
  }

  /** Q input for acting and target bootstraps: prompt slot zeroed. */
  private qInput(states: Float32Array[]): tf.Tensor2D {
    const encoded = this.encodeBatch(states);
    if (!this.flags.dlpg) {
      return encoded;
    }
    const zeros = tf.zeros([states.length, this.cfg.diffusion.promptDim]);
    return tf.concat([encoded, zeros], 1) as tf.Tensor2D;
  }

  /** Q values for one state, prompt slot zeroed. */
  qValuesFor(state: Float32Array): number[] {
    return tf.tidy(() => Array.from(this.online.forward(this.qInput([state])).dataSync()));
  }

  /**
   * Epsilon-greedy over the currently visible satellites; -1 (hold) when
   * nothing is visible.
   */
  act(state: Float32Array, visibleMask: ArrayLike<number>, epsilon: number): number {
    const candidates: number[] = [];
    for (let i = 0; i < this.cfg.actionCount; i++) {
      if (visibleMask[i]) {
        candidates.push(i);
      }
    }
    if (candidates.length === 0) {
      return -1;
    }
    if (this.rng.uniform() < epsilon) {
      return candidates[this.rng.int(candidates.length)];
    }
    const q = this.qValuesFor(state);
    let best = candidates[0];
    for (const candidate of candidates) {
      if (q[candidate] > q[best]) {
        best = candidate;
      }
    }
    return best;
  }

  /**
   * Record a transition; every policyUpdateEvery environment steps (once the
   * buffer holds a batch) run one gradient step plus a soft target update.
   */
  observe(transition: Transition): TrainStepStats | null {
    this.buffer.push(transition);
    this.envSteps += 1;
    if (this.envSteps % this.cfg.hp.policyUpdateEvery !== 0) {
      return null;
    }
    if (this.buffer.size <= this.cfg.hp.batchSize) {
      return null;
    }
    return this.trainStep();
  }

  trainStep(): TrainStepStats {
    const { hp } = this.cfg;
    const batch = this.buffer.sample(hp.batchSize, this.rng);
    const states = batch.map((b) => b.state);
    const nextStates = batch.map((b) => b.nextState);
    const actions = batch.map((b) => b.action);
    const rewards = batch.map((b) => b.reward);
    const dones = batch.map((b) => b.done);

    // bootstrap targets, outside the gradient tape
    const [nextOnline, nextTarget] = tf.tidy(() => {
      const nextX = this.qInput(nextStates);
      return [
        this.online.forward(nextX).arraySync() as number[][],
        this.target.forward(nextX).arraySync() as number[][],
      ];
    });
    const targets = tdTargets(rewards, dones, hp.gamma, nextOnline, nextTarget, this.flags.double);

    // sampled prompts are inputs to the Q loss, not a gradient path
    let prompts: Float32Array | null = null;
    if (this.flags.dlpg) {
      prompts = tf.tidy(() => {
        const enc = this.encodeBatch(states);
        const ea = tf.gather(this.actionEmbed!, actions);
        const cond = tf.concat([enc, ea], 1) as tf.Tensor2D;
        return dlpgSample(this.denoiser!, this.schedule!, cond, this.rng);
      });
    }

    const varList: tf.Variable[] = [...this.online.variables];
    if (this.encoder) {
      varList.push(...this.encoder.variables);
    }
    if (this.denoiser) {
      varList.push(...this.denoiser.variables, this.actionEmbed!);
    }

    let tdLossValue = 0;
    let dlpgLossValue = 0;
    const { value, grads } = tf.variableGrads(() => {
      const enc = this.encodeBatch(states);
      let x: tf.Tensor2D = enc;
      if (this.flags.dlpg) {
        const promptTensor = tf.tensor2d(prompts!, [hp.batchSize, this.cfg.diffusion.promptDim]);
        x = tf.concat([enc, promptTensor], 1) as tf.Tensor2D;
      }
      const q = this.online.forward(x);
      const mask = tf.oneHot(tf.tensor1d(actions, "int32"), this.cfg.actionCount);
      const chosen = tf.sum(tf.mul(q, mask), 1);
      const td = tf.mean(tf.square(tf.sub(chosen, tf.tensor1d(targets)))) as tf.Scalar;
      tdLossValue = td.dataSync()[0];
      if (!this.flags.dlpg) {
        return td;
      }
      const ea = tf.gather(this.actionEmbed!, actions) as tf.Tensor2D;
      const cond = tf.concat([enc, ea], 1) as tf.Tensor2D;
      const dlpg = dlpgTrainLoss(this.denoiser!, this.schedule!, cond, this.rng);
      dlpgLossValue = dlpg.dataSync()[0];
      return tf.add(td, tf.mul(dlpg, this.cfg.dlpgLossWeight)) as tf.Scalar;
    }, varList);

    this.optimizer.applyGradients(grads);
    const lossValue = value.dataSync()[0];
    value.dispose();
    Object.values(grads).forEach((g) => g.dispose());

    softUpdate(this.online, this.target, hp.softUpdateRate);
    this.trainSteps += 1;
    return { loss: lossValue, tdLoss: tdLossValue, dlpgLoss: dlpgLossValue };
  }

  saveCheckpoint(): Record<string, unknown> {
    const out: Record<string, unknown> = {
      variant: this.cfg.variant,
      online: this.online.saveWeights(),
      target: this.target.saveWeights(),
    };
    if (this.encoder) {
      out["encoder"] = this.encoder.saveWeights();
    }
    if (this.denoiser) {
      out["denoiser"] = this.denoiser.saveWeights();
      out["actionEmbed"] = Array.from(this.actionEmbed!.dataSync());
    }
    return out;
  }

  loadCheckpoint(checkpoint: Record<string, unknown>): void {
    this.online.loadWeights(checkpoint["online"] as Record<string, number[]>);
    this.target.loadWeights(checkpoint["target"] as Record<string, number[]>);
    if (this.encoder) {
      this.encoder.loadWeights(checkpoint["encoder"] as Record<string, number[]>);
    }
    if (this.denoiser) {
      this.denoiser.loadWeights(checkpoint["denoiser"] as Record<string, number[]>);
      const data = checkpoint["actionEmbed"] as number[];
      const next = tf.tensor2d(data, [this.cfg.actionCount, this.cfg.diffusion.actionEmbedDim]);
      this.actionEmbed!.assign(next);
      next.dispose();
    }
  }

  dispose(): void {
    this.online.dispose();
    this.target.dispose();
    this.encoder?.dispose();
    this.denoiser?.dispose();
    this.actionEmbed?.dispose();
    this.optimizer.dispose();
  }
}
