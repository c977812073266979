"""Episode rollouts under the baseline policies, and seed-averaged evaluation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .env import EnvState, SaginEnv, SimConfig
from .policies import EwgWeights, ewg_select, random_select, rr_select
from .rng import substream

POLICY_NAMES = ("random", "rr", "ewg")


@dataclass
class EpisodeResult:
    seed: int
    policy: str
    f1: float
    f2: float
    total_reward: float
    records: list[dict[str, Any]] = field(default_factory=list)
    events: list = field(default_factory=list)


def make_policy(
    name: str, seed: int, weights: EwgWeights = EwgWeights()
) -> Callable[[SaginEnv, EnvState], int | None]:
    """Selector closure for one episode; RANDOM gets its own substream of the seed."""
    if name == "random":
        rng = substream(seed, "policy", "random")
        return lambda env, state: random_select(env.visible, rng)
    if name == "rr":
        return lambda env, state: rr_select(env.visible, state.last_selection)
    if name == "ewg":
        return lambda env, state: ewg_select(
            env.visible, state.delta, len(env.queue), state.last_selection, weights
        )
    raise ValueError(f"unknown policy {name!r}; expected one of {POLICY_NAMES}")


def run_episode(
    config: SimConfig,
    policy: str,
    seed: int,
    weights: EwgWeights = EwgWeights(),
    actions: Sequence[int] | None = None,
) -> EpisodeResult:
    """Roll one full episode; ``actions`` (if given) replaces the policy verbatim."""
    env = SaginEnv(config, seed=seed)
    state = env.reset(seed)
    select = make_policy(policy, seed, weights) if actions is None else None
    for t in range(config.episode_slots):
        if actions is not None:
            action: int | None = int(actions[t]) if t < len(actions) else None
        else:
            action = select(env, state)
        outcome = env.step(action)
        state = outcome.state
    report = env.objective_report()
    return EpisodeResult(
        seed=seed,
        policy=policy if actions is None else "replay",
        f1=report["f1"],
        f2=report["f2"],
        total_reward=report["total_reward"],
        records=env.trace,
        events=env.event_log,
    )


def evaluate(
    config: SimConfig,
    policy: str,
    seeds: Sequence[int],
    weights: EwgWeights = EwgWeights(),
) -> dict[str, float]:
    """Mean/std of the episode objectives over seeds."""
    f1s, f2s, rewards = [], [], []
    for seed in seeds:
        result = run_episode(config, policy, seed, weights)
        f1s.append(result.f1)
        f2s.append(result.f2)
        rewards.append(result.total_reward)
    return {
        "episodes": float(len(seeds)),
        "f1_mean": float(np.mean(f1s)),
        "f1_std": float(np.std(f1s)),
        "f2_mean": float(np.mean(f2s)),
        "f2_std": float(np.std(f2s)),
        "reward_mean": float(np.mean(rewards)),
        "reward_std": float(np.std(rewards)),
    }
