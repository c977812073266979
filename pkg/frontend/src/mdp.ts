/**
 * A tiny deterministic MDP with a known optimal policy, used to verify that
 * the Q-learning variants actually learn. Two states, two actions:
 *
 *   state 0: action 0 stays (reward +2), action 1 moves to 1 (reward -1)
 *   state 1: action 0 stays (reward 0), action 1 moves to 0 (reward +3)
 *
 * At gamma = 0.8 the optimal policy is stay-in-0 / leave-1, with an action
 * gap of 2.2 in both states.
 */

export interface MdpSpec {
  /** transitions[s][a] -> next state */
  transitions: number[][];
  /** rewards[s][a] */
  rewards: number[][];
}

export const TWO_STATE_MDP: MdpSpec = {
  transitions: [
    [0, 1],
    [1, 0],
  ],
  rewards: [
    [2, -1],
    [0, 3],
  ],
};

export function numStates(mdp: MdpSpec): number {
  return mdp.transitions.length;
}

export function numActions(mdp: MdpSpec): number {
  return mdp.transitions[0].length;
}

/** Q* by value iteration to fixed point. */
export function valueIteration(mdp: MdpSpec, gamma: number, sweeps = 10_000, tol = 1e-12): number[][] {
  const S = numStates(mdp);
  const A = numActions(mdp);
  let q = Array.from({ length: S }, () => new Array<number>(A).fill(0));
  for (let sweep = 0; sweep < sweeps; sweep++) {
    const next = Array.from({ length: S }, () => new Array<number>(A).fill(0));
    let worst = 0;
    for (let s = 0; s < S; s++) {
      for (let a = 0; a < A; a++) {
        const s2 = mdp.transitions[s][a];
        next[s][a] = mdp.rewards[s][a] + gamma * Math.max(...q[s2]);
        worst = Math.max(worst, Math.abs(next[s][a] - q[s][a]));
      }
    }
    q = next;
    if (worst < tol) {
      break;
    }
  }
  return q;
}

export function greedyPolicy(q: number[][]): number[] {
  return q.map((row) => row.indexOf(Math.max(...row)));
}

export function oneHot(state: number, size: number): Float32Array {
  const out = new Float32Array(size);
  out[state] = 1;
  return out;
}
