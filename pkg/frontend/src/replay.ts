/** Experience replay: bounded FIFO store with uniform sampling. */
import { Rng } from "./rng.js";

export interface Transition {
  state: Float32Array;
  action: number;
  reward: number;
  nextState: Float32Array;
  done: boolean;
}

export class ReplayBuffer {
  readonly capacity: number;
  private entries: Transition[] = [];
  private cursor = 0;

  constructor(capacity: number) {
    if (capacity < 1) {
      throw new Error("capacity must be positive");
    }
    this.capacity = capacity;
  }

  get size(): number {
    return this.entries.length;
  }

  /** Append, evicting the oldest entry once at capacity. */
  push(transition: Transition): void {
    if (this.entries.length < this.capacity) {
      this.entries.push(transition);
    } else {
      this.entries[this.cursor] = transition;
    }
    this.cursor = (this.cursor + 1) % this.capacity;
  }

  /** i.i.d. uniform sample of `batchSize` stored transitions. */
  sample(batchSize: number, rng: Rng): Transition[] {
    if (this.entries.length === 0) {
      throw new Error("buffer is empty");
    }
    const out: Transition[] = [];
    for (let i = 0; i < batchSize; i++) {
      out.push(this.entries[rng.int(this.entries.length)]);
    }
    return out;
  }
}
