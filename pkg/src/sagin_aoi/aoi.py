"""Three-layer age-of-information ledger and the freshness objective.

Ages are integer slot counts tracked at three places: theta_i at satellite i (slots
since its sensor last generated an update), delta_i at the HAP (staleness of what
the relay holds about satellite i), and Delta_{i,j} at user j (staleness of what the
user holds about satellite i). Service events reset an age to a snapshot of the
layer above, backdated by the integer transfer delay; every other slot ages +1.

Episodes start fully synchronized at age 0, so snapshot lookups that reach before
slot 0 clamp to that initial state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def step_satellite_age(age: int, generated: bool) -> int:
    """Satellite-layer recursion: reset to 0 on generation, else age one slot."""
    return 0 if generated else age + 1


def transfer_delay(batch_bits: float, rate_bps: float, slot_duration: float) -> int | None:
    """Whole-slot transfer delay of a batch: ceil(bits / (rate * slot)).

    An empty batch takes 0 slots. A nonempty batch over a dead link (rate <= 0)
    cannot transfer at all; that is signalled as None, not as a delay.
    """
    if batch_bits < 0.0:
        raise ValueError("batch_bits must be nonnegative")
    if batch_bits == 0.0:
        return 0
    if rate_bps <= 0.0:
        return None
    return int(math.ceil(batch_bits / (rate_bps * slot_duration)))


def step_relay_age(age: int, served: bool, upstream_snapshot: int, delay: int) -> int:
    """HAP-layer recursion: on service, the relay's copy is the satellite state
    ``delay`` slots ago plus the delay; otherwise age one slot."""
    return upstream_snapshot + delay if served else age + 1


def step_user_age(age: int, delivered: bool, upstream_snapshot: int, delay: int) -> int:
    """User-layer recursion, same shape as the relay layer."""
    return upstream_snapshot + delay if delivered else age + 1


@dataclass
class AoiLedger:
    """Age state for N_S satellites and N_U users, with per-slot history.

    History index k holds the ages after slot k; index 0 is the synchronized
    initial state. Histories are what service events snapshot from, and what the
    acceptance re-simulation replays against.
    """

    num_satellites: int
    num_users: int
    theta: np.ndarray = field(init=False)
    delta: np.ndarray = field(init=False)
    user_age: np.ndarray = field(init=False)
    theta_history: list[np.ndarray] = field(init=False)
    delta_history: list[np.ndarray] = field(init=False)
    user_age_history: list[np.ndarray] = field(init=False)

    def __post_init__(self) -> None:
        self.theta = np.zeros(self.num_satellites, dtype=np.int64)
        self.delta = np.zeros(self.num_satellites, dtype=np.int64)
        self.user_age = np.zeros((self.num_satellites, self.num_users), dtype=np.int64)
        self.theta_history = [self.theta.copy()]
        self.delta_history = [self.delta.copy()]
        self.user_age_history = [self.user_age.copy()]

    def theta_snapshot(self, slot: int) -> np.ndarray:
        """Satellite ages after the given slot; pre-episode indices clamp to 0."""
        return self.theta_history[max(slot, 0)]

    def delta_snapshot(self, slot: int) -> np.ndarray:
        return self.delta_history[max(slot, 0)]

    def advance_satellites(self, generated: np.ndarray) -> None:
        """Apply the satellite-layer recursion for one slot and record history."""
        self.theta = np.where(generated, 0, self.theta + 1).astype(np.int64)
        self.theta_history.append(self.theta.copy())

    def advance_relay(self, served_satellite: int | None, delay: int, slot: int) -> None:
        """Apply the HAP-layer recursion for one slot and record history.

        ``served_satellite`` is the satellite whose update (possibly an empty sync,
        delay 0) reached the relay this slot, or None when no transfer happened.
        ``slot`` is the current slot index; the snapshot is taken at slot - delay.
        """
        new = self.delta + 1
        if served_satellite is not None:
            snapshot = self.theta_snapshot(slot - delay)[served_satellite]
            new[served_satellite] = snapshot + delay
        self.delta = new.astype(np.int64)
        self.delta_history.append(self.delta.copy())

    def advance_users(
        self, delivered_pairs: dict[tuple[int, int], int], slot: int
    ) -> None:
        """Apply the user-layer recursion for one slot and record history.

        ``delivered_pairs`` maps (satellite, user) to that user's batch delay for
        the slot; every pair not present ages one slot.
        """
        new = self.user_age + 1
        for (sat, user), delay in delivered_pairs.items():
            snapshot = self.delta_snapshot(slot - delay)[sat]
            new[sat, user] = snapshot + delay
        self.user_age = new.astype(np.int64)
        self.user_age_history.append(self.user_age.copy())

    def per_satellite_user_age(self) -> np.ndarray:
        """Current Delta_i: mean over users of Delta_{i,j}, one value per satellite."""
        return self.user_age.mean(axis=1)


def objective_freshness(user_age_history: list[np.ndarray]) -> float:
    """Time-averaged system age f1 = (1/T) * sum_t sum_i mean_j Delta_{i,j}[t].

    ``user_age_history`` must contain the T post-slot states (the ledger's history
    minus its initial entry).
    """
    if not user_age_history:
        raise ValueError("need at least one slot of history")
    total = 0.0
    for snapshot in user_age_history:
        total += float(snapshot.mean(axis=1).sum())
    return total / len(user_age_history)


@dataclass
class PacketGenProcess:
    """Per-satellite Bernoulli(p_gen) status-update generation."""

    p_gen: float
    rng: np.random.Generator

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_gen <= 1.0:
            raise ValueError("p_gen must be a probability")

    def draw(self, num_satellites: int) -> np.ndarray:
        return self.rng.random(num_satellites) < self.p_gen
