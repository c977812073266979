/** Training and architecture hyperparameters, with the stock defaults. */

export interface AgentHyperparams {
  batchSize: number;
  gamma: number;
  bufferCapacity: number;
  /** Soft-update rate tau for the target network. */
  softUpdateRate: number;
  /** A gradient step happens every this many environment steps. */
  policyUpdateEvery: number;
  denoisingSteps: number;
  episodes: number;
  learningRate: number;
  epsilonStart: number;
  epsilonEnd: number;
  /** Fraction of total episodes over which epsilon decays linearly. */
  epsilonDecayFraction: number;
}

export const DEFAULT_HYPERPARAMS: AgentHyperparams = {
  batchSize: 128,
  gamma: 0.99,
  bufferCapacity: 100_000,
  softUpdateRate: 0.005,
  policyUpdateEvery: 10,
  denoisingSteps: 4,
  episodes: 5000,
  learningRate: 3e-4,
  epsilonStart: 1.0,
  epsilonEnd: 0.05,
  epsilonDecayFraction: 0.2,
};

export interface SteConfig {
  numLayers: number;
  numHeads: number;
  embedDim: number;
  /** Hidden width of the position-wise FFN. */
  ffnDim: number;
}

export const DEFAULT_STE: SteConfig = {
  numLayers: 2,
  numHeads: 4,
  embedDim: 64,
  ffnDim: 128,
};

export interface DiffusionConfig {
  steps: number;
  betaStart: number;
  betaEnd: number;
  promptDim: number;
  actionEmbedDim: number;
  timeEmbedDim: number;
  hiddenDim: number;
}

export const DEFAULT_DIFFUSION: DiffusionConfig = {
  steps: 4,
  betaStart: 1e-4,
  betaEnd: 0.02,
  promptDim: 32,
  actionEmbedDim: 16,
  timeEmbedDim: 16,
  hiddenDim: 64,
};

/** Trunk widths of the dueling Q-network. */
export const DEFAULT_TRUNK: number[] = [256, 256, 128];

export type Variant = "dqn" | "ddqn" | "d3qn" | "dd3qn-as";

export interface VariantFlags {
  /** Double targets: online argmax evaluated by the target network. */
  double: boolean;
  dueling: boolean;
  /** Transformer state encoder instead of feeding the raw state vector. */
  ste: boolean;
  /** Diffusion latent prompt concatenated to the encoded state. */
  dlpg: boolean;
}

export function variantFlags(variant: Variant): VariantFlags {
  switch (variant) {
    case "dqn":
      return { double: false, dueling: false, ste: false, dlpg: false };
    case "ddqn":
      return { double: true, dueling: false, ste: false, dlpg: false };
    case "d3qn":
      return { double: true, dueling: true, ste: false, dlpg: false };
    case "dd3qn-as":
      return { double: true, dueling: true, ste: true, dlpg: true };
  }
}

/** Linear decay from epsilonStart to epsilonEnd over the first decay fraction. */
export function epsilonAt(episode: number, hp: AgentHyperparams): number {
  const decayEpisodes = Math.max(1, Math.floor(hp.episodes * hp.epsilonDecayFraction));
  const progress = Math.min(1, episode / decayEpisodes);
  return hp.epsilonStart + (hp.epsilonEnd - hp.epsilonStart) * progress;
}
