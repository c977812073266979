"""Shared HAP relay buffer with per-user virtual queues and scheduling policies.

The HAP keeps one physical ordered buffer of capacity L_q packets shared by all
users. When an admitted batch would overflow it, the oldest entries (buffer head)
are dropped first. Each user sees a virtual queue: the subsequence of buffered
packets addressed to it. Per slot and per user, a scheduling policy drains the
virtual queue greedily into the slot's link capacity.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


@dataclass
class Packet:
    """One user-addressed copy of a satellite status update.

    Sizes are in bits; times are slot indices. deadline = gen_time + ttl orders the
    deadline-based policies and is not an expiry (packets leave only by delivery or
    overflow drop).
    """

    id: int
    source_satellite: int
    dest_user: int
    gen_time: int
    size_bits: int
    deadline: int
    hap_arrival_time: int | None = None

    def __post_init__(self) -> None:
        if self.size_bits <= 0:
            raise ValueError("size_bits must be positive")
        if self.deadline < self.gen_time:
            raise ValueError("deadline must be >= gen_time")


class SchedulingPolicy(enum.Enum):
    RANDOM = "random"
    FIFO = "fifo"
    EDF = "edf"
    LDF = "ldf"
    SJF = "sjf"


# Policy sort keys; lower sorts first, packet id breaks every tie deterministically.
_POLICY_KEYS = {
    SchedulingPolicy.FIFO: lambda p: (p.hap_arrival_time, p.id),
    SchedulingPolicy.EDF: lambda p: (p.deadline, p.id),
    SchedulingPolicy.LDF: lambda p: (-p.deadline, p.id),
    SchedulingPolicy.SJF: lambda p: (p.size_bits, p.id),
}


@dataclass
class BufferQueue:
    """Finite shared packet store, ordered by admission."""

    capacity: int
    entries: list[Packet] = field(default_factory=list)
    drop_count: int = 0

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")

    def __len__(self) -> int:
        return len(self.entries)

    def enqueue_batch(self, batch: Iterable[Packet], t: int) -> list[Packet]:
        """Admit a batch at slot t; returns the packets dropped from the head.

        The whole batch is appended in order, then the head is trimmed until the
        buffer fits its capacity again (oldest data is sacrificed for new data).
        A batch larger than the capacity therefore also drops its own oldest part.
        """
        for packet in batch:
            packet.hap_arrival_time = t
            self.entries.append(packet)
        dropped: list[Packet] = []
        overflow = len(self.entries) - self.capacity
        if overflow > 0:
            dropped = self.entries[:overflow]
            del self.entries[:overflow]
            self.drop_count += len(dropped)
        return dropped

    def virtual_queue(self, user: int) -> list[Packet]:
        """The user's virtual queue: buffered packets addressed to it, in order."""
        return [p for p in self.entries if p.dest_user == user]

    def virtual_queue_lengths(self, num_users: int) -> np.ndarray:
        lengths = np.zeros(num_users, dtype=np.int64)
        for p in self.entries:
            lengths[p.dest_user] += 1
        return lengths

    def schedule_for_user(
        self,
        user: int,
        policy: SchedulingPolicy,
        capacity_bits: float,
        rng: np.random.Generator | None = None,
    ) -> list[Packet]:
        """Drain the user's virtual queue greedily into one slot's capacity.

        Repeatedly removes the policy's top candidate while it fits the remaining
        capacity; stops at the first candidate that does not fit (head-of-line
        semantics, no skipping). RANDOM draws each pick uniformly from ``rng``.
        """
        if capacity_bits <= 0.0:
            return []
        candidates = self.virtual_queue(user)
        selected: list[Packet] = []
        remaining = float(capacity_bits)
        while candidates:
            if policy is SchedulingPolicy.RANDOM:
                if rng is None:
                    raise ValueError("RANDOM scheduling needs an rng")
                top = candidates[int(rng.integers(len(candidates)))]
            else:
                top = min(candidates, key=_POLICY_KEYS[policy])
            if top.size_bits > remaining:
                break
            selected.append(top)
            remaining -= top.size_bits
            candidates.remove(top)
            self.entries.remove(top)
        return selected
