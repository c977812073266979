"""Slot-stepped relay downlink environment.

One episode simulates T slots of a LEO constellation pushing status updates to
ground users through a single HAP relay. Per slot the controller picks which
visible satellite feeds the HAP over the optical uplink; the HAP buffers the
update (replicated once per user), splits its RF power budget max-min across
users, and drains per-user virtual queues under a scheduling policy. Ages are
tracked by a three-layer ledger; the reward trades off system age, accumulated
handovers, and delivered rate.

Slot pipeline (order is the contract; every stage sees the previous stage's
output within the same slot):
  1. per-satellite update generation, satellite-age advance
  2. selection validation (invalid or absent -> hold) and handover bookkeeping
  3. optical draw, decode gate, update transfer with whole-slot delay, relay-age
     advance; the selected satellite's fresh update fans out into one packet per
     user at the buffer (head-drop on overflow)
  4. RF draws, max-min power split, per-user scheduling into one slot of link
     capacity, user-age advance
  5. reward assembly
  6. satellite positions advance, visibility refresh, episode-end check
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .aoi import AoiLedger, PacketGenProcess, objective_freshness, transfer_delay
from .channel import (
    FsoLinkParams,
    RfLinkParams,
    decode_indicator,
    egc_gain,
    fso_snr,
    rf_large_scale,
    sample_nakagami,
    shannon_rate,
)
from .hap_queue import BufferQueue, Packet, SchedulingPolicy
from .orbital import (
    HandoverLedger,
    OrbitalElements,
    PhysicalConstants,
    constellation_positions,
    visible_set,
)
from .power_alloc import PowerAllocation, PowerAllocProblem, solve_max_min
from .rng import substream

DEG = math.pi / 180.0

# Inclination bands (deg) cycled over the generated constellation.
_INCLINATION_BANDS = ((0.0, 10.0), (40.0, 60.0), (80.0, 100.0))


@dataclass(frozen=True)
class SatelliteSpec:
    """Config-facing orbital elements of one satellite (degrees, meters)."""

    altitude_m: float
    inclination_deg: float
    raan_deg: float
    arg_perigee_deg: float
    true_anomaly_deg: float

    def to_elements(self, constants: PhysicalConstants) -> OrbitalElements:
        return OrbitalElements(
            altitude=self.altitude_m,
            inclination=self.inclination_deg * DEG,
            raan=self.raan_deg * DEG,
            arg_perigee_init=self.arg_perigee_deg * DEG,
            true_anomaly=self.true_anomaly_deg * DEG,
            constants=constants,
        )


@dataclass(frozen=True)
class SimConfig:
    """Full scenario description; every default is overridable from the config file.

    reward_aoi_weight and reward_rate_weight default to None, which resolves to
    1/(num_satellites * aoi_cap) and 1/(num_users * rf.bandwidth_hz): the age term
    then spans roughly [-1, 0] while ages stay under aoi_cap, and the rate bonus
    is the mean spectral efficiency. handover_penalty selects whether the penalty
    charges the cumulative handover count each slot or only switching slots.
    """

    num_satellites: int = 10
    num_users: int = 10
    episode_slots: int = 500
    slot_duration_s: float = 1.0
    min_elevation_deg: float = 10.0
    hap_altitude_m: float = 20000.0
    user_area_m: float = 1000.0
    altitude_range_m: tuple[float, float] = (5.0e5, 1.8e6)
    constellation: tuple[SatelliteSpec, ...] | None = None
    fso: FsoLinkParams = field(default_factory=FsoLinkParams)
    rf: RfLinkParams = field(default_factory=RfLinkParams)
    p_min_w: float = 0.1
    p_max_w: float = 2.0
    p_total_w: float = 10.0
    queue_capacity: int = 80
    scheduling: SchedulingPolicy = SchedulingPolicy.FIFO
    packet_size_bits: int = 2_500_000
    ttl_slots: int = 50
    p_gen: float = 0.3
    aoi_cap: float = 100.0
    reward_aoi_weight: float | None = None
    reward_handover_weight: float = 0.1
    reward_rate_weight: float | None = None
    handover_penalty: str = "cumulative"
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self) -> None:
        if self.num_satellites < 1 or self.num_users < 1:
            raise ValueError("need at least one satellite and one user")
        if self.episode_slots < 1:
            raise ValueError("episode_slots must be >= 1")
        if self.handover_penalty not in ("cumulative", "event"):
            raise ValueError("handover_penalty must be 'cumulative' or 'event'")
        if self.constellation is not None and len(self.constellation) != self.num_satellites:
            raise ValueError("explicit constellation length must match num_satellites")
        if self.num_users * self.p_min_w > self.p_total_w:
            raise ValueError("power budget cannot cover the per-user floor")

    @property
    def aoi_weight(self) -> float:
        if self.reward_aoi_weight is not None:
            return self.reward_aoi_weight
        return 1.0 / (self.num_satellites * self.aoi_cap)

    @property
    def rate_weight(self) -> float:
        if self.reward_rate_weight is not None:
            return self.reward_rate_weight
        return 1.0 / (self.num_users * self.rf.bandwidth_hz)


def generate_constellation(config: SimConfig, rng: np.random.Generator) -> tuple[SatelliteSpec, ...]:
    """Seeded default constellation whose ground passes sweep the HAP cone.

    Altitudes are evenly spaced over altitude_range_m and inclinations cycle
    through equatorial / mid / near-polar bands. Node longitudes sit within a few
    degrees of the HAP's ground point (on the +x axis) and the initial along-track
    phase of satellite i is set so its closest approach to that axis happens near
    t = 120*i - 60 s: passes overlap and succeed each other instead of scattering
    around the orbit, where the visibility cone (half-angle 14-30 deg) would stay
    empty almost all the time.
    """
    n = config.num_satellites
    alts = np.linspace(config.altitude_range_m[0], config.altitude_range_m[1], n)
    specs = []
    for i in range(n):
        band = _INCLINATION_BANDS[i % len(_INCLINATION_BANDS)]
        inc = rng.uniform(band[0], band[1]) * DEG
        raan = rng.uniform(-8.0, 8.0) * DEG
        pass_time_s = 120.0 * i - 60.0 + rng.uniform(-50.0, 50.0)
        elements = OrbitalElements(
            altitude=float(alts[i]),
            inclination=inc,
            raan=raan,
            arg_perigee_init=0.0,
            true_anomaly=0.0,
            constants=config.constants,
        )
        # Along-track angle of closest approach to the +x axis for this plane.
        u_star = math.atan2(-math.cos(inc) * math.sin(raan), math.cos(raan))
        u0 = u_star - 2.0 * math.pi * pass_time_s / elements.period
        nu = rng.uniform(0.0, 2.0 * math.pi)
        specs.append(
            SatelliteSpec(
                altitude_m=float(alts[i]),
                inclination_deg=inc / DEG,
                raan_deg=raan / DEG,
                arg_perigee_deg=((u0 - nu) % (2.0 * math.pi)) / DEG,
                true_anomaly_deg=nu / DEG,
            )
        )
    return tuple(specs)


@dataclass
class EnvState:
    """Observable state after each slot; ages are copies, safe to mutate."""

    slot: int
    sat_positions: np.ndarray
    user_positions: np.ndarray
    theta: np.ndarray
    delta: np.ndarray
    user_age: np.ndarray
    visible_mask: np.ndarray
    last_selection: int | None

    def to_vector(self) -> np.ndarray:
        """Flat float64 layout matching state_schema (last_selection -1 for none)."""
        last = -1.0 if self.last_selection is None else float(self.last_selection)
        return np.concatenate(
            [
                self.sat_positions.ravel(),
                self.user_positions.ravel(),
                self.theta.astype(float),
                self.delta.astype(float),
                self.user_age.ravel().astype(float),
                self.visible_mask.astype(float),
                [last],
            ]
        )


def state_schema(num_satellites: int, num_users: int) -> list[dict[str, Any]]:
    """Field layout of EnvState.to_vector, in order, with shapes and units."""
    return [
        {"name": "sat_positions", "shape": [num_satellites, 3], "units": "m"},
        {"name": "user_positions", "shape": [num_users, 3], "units": "m"},
        {"name": "theta", "shape": [num_satellites], "units": "slots"},
        {"name": "delta", "shape": [num_satellites], "units": "slots"},
        {"name": "user_age", "shape": [num_satellites, num_users], "units": "slots"},
        {"name": "visible_mask", "shape": [num_satellites], "units": "bool"},
        {"name": "last_selection", "shape": [1], "units": "index"},
    ]


@dataclass
class StepOutcome:
    reward: float
    reward_aoi: float
    reward_handover: float
    reward_rate: float
    state: EnvState
    done: bool
    info: dict[str, Any]


@dataclass
class SlotEvents:
    """Minimal event record from which the age recursions can be replayed."""

    slot: int
    generated: np.ndarray
    relay_served: int | None
    relay_delay: int
    deliveries: dict[tuple[int, int], int]


@dataclass
class _PendingUpdate:
    gen_time: int
    size_bits: int


class SaginEnv:
    """Deterministic single-episode environment; reseed via reset."""

    def __init__(self, config: SimConfig, seed: int = 0):
        self.config = config
        self.seed = seed
        self.reset(seed)

    # -- lifecycle -----------------------------------------------------------

    def reset(self, seed: int | None = None) -> EnvState:
        if seed is not None:
            self.seed = int(seed)
        cfg = self.config
        scenario_rng = substream(self.seed, "scenario")
        specs = cfg.constellation or generate_constellation(cfg, scenario_rng)
        self.elements = [s.to_elements(cfg.constants) for s in specs]
        self.hap_position = np.array([cfg.constants.earth_radius + cfg.hap_altitude_m, 0.0, 0.0])
        offsets = scenario_rng.uniform(-cfg.user_area_m / 2.0, cfg.user_area_m / 2.0, size=(cfg.num_users, 2))
        self.user_positions = np.column_stack(
            [np.full(cfg.num_users, cfg.constants.earth_radius), offsets[:, 0], offsets[:, 1]]
        )
        self._user_gain = np.array(
            [
                rf_large_scale(cfg.rf, float(np.linalg.norm(self.hap_position - self.user_positions[j])))
                for j in range(cfg.num_users)
            ]
        )
        self._gen = PacketGenProcess(cfg.p_gen, substream(self.seed, "gen"))
        self._fso_rng = substream(self.seed, "fso")
        self._rf_rngs = [substream(self.seed, "rf", j) for j in range(cfg.num_users)]
        self._sched_rng = substream(self.seed, "sched")
        self.ledger = AoiLedger(cfg.num_satellites, cfg.num_users)
        self.queue = BufferQueue(capacity=cfg.queue_capacity)
        self.handovers = HandoverLedger()
        self._pending: list[_PendingUpdate | None] = [None] * cfg.num_satellites
        self._packet_id = 0
        self.slot = 0
        self._done = False
        self.trace: list[dict[str, Any]] = []
        self.event_log: list[SlotEvents] = []
        self._positions = constellation_positions(self.elements, 0, cfg.slot_duration_s)
        self._visible = visible_set(self._positions, self.hap_position, cfg.min_elevation_deg * DEG)
        return self._make_state()

    def _make_state(self) -> EnvState:
        mask = np.zeros(self.config.num_satellites, dtype=bool)
        mask[self._visible] = True
        return EnvState(
            slot=self.slot,
            sat_positions=self._positions.copy(),
            user_positions=self.user_positions.copy(),
            theta=self.ledger.theta.copy(),
            delta=self.ledger.delta.copy(),
            user_age=self.ledger.user_age.copy(),
            visible_mask=mask,
            last_selection=self.handovers.current_selection,
        )

    @property
    def visible(self) -> list[int]:
        return list(self._visible)

    def current_state(self) -> EnvState:
        """Observable state right now; same layout reset and step return."""
        return self._make_state()

    # -- stepping ------------------------------------------------------------

    def step(self, action: int | None) -> StepOutcome:
        if self._done:
            raise RuntimeError("episode finished; call reset")
        cfg = self.config
        t = self.slot + 1

        # 1. generation and satellite-age advance
        generated = self._gen.draw(cfg.num_satellites)
        for i in np.nonzero(generated)[0]:
            # keep-latest: a fresh update replaces any undelivered one
            self._pending[int(i)] = _PendingUpdate(gen_time=t, size_bits=cfg.packet_size_bits)
        self.ledger.advance_satellites(generated)

        # 2. selection validation and handover bookkeeping
        requested = None if action is None or int(action) < 0 else int(action)
        invalid = requested is not None and requested not in self._visible
        held = self.handovers.current_selection
        if requested is not None and not invalid:
            selection = requested
        elif held is not None and held in self._visible:
            selection = held
        else:
            selection = None
        switched = self.handovers.record(selection) if selection is not None else False

        # 3. optical hop and relay-age advance
        h_egc = egc_gain(cfg.fso, self._fso_rng)
        gamma_hap = fso_snr(cfg.fso, h_egc)
        z_hap = decode_indicator(gamma_hap, cfg.fso.snr_threshold)
        fso_rate = shannon_rate(cfg.fso.bandwidth_hz, gamma_hap)
        relay_served: int | None = None
        relay_delay = 0
        dropped: list[Packet] = []
        if selection is not None and z_hap:
            update = self._pending[selection]
            if update is None:
                relay_served, relay_delay = selection, 0  # sync: relay matches theta
            else:
                delay = transfer_delay(update.size_bits, fso_rate, cfg.slot_duration_s)
                if delay is not None:
                    relay_served, relay_delay = selection, delay
                    batch = []
                    for j in range(cfg.num_users):
                        batch.append(
                            Packet(
                                id=self._packet_id,
                                source_satellite=selection,
                                dest_user=j,
                                gen_time=update.gen_time,
                                size_bits=update.size_bits,
                                deadline=update.gen_time + cfg.ttl_slots,
                            )
                        )
                        self._packet_id += 1
                    dropped = self.queue.enqueue_batch(batch, t)
                    self._pending[selection] = None
        self.ledger.advance_relay(relay_served, relay_delay, t)

        # 4. RF hop: fades, max-min power split, per-user scheduling, user ages
        fades = np.array([float(sample_nakagami(cfg.rf.nakagami_m, rng)) for rng in self._rf_rngs])
        channel_gains = self._user_gain * fades
        a = channel_gains**2 / cfg.rf.noise_power_w
        problem = PowerAllocProblem(
            gains=tuple(float(v) for v in a),
            bandwidths=(cfg.rf.bandwidth_hz,) * cfg.num_users,
            p_min=cfg.p_min_w,
            p_max=cfg.p_max_w,
            p_total=cfg.p_total_w,
        )
        alloc: PowerAllocation = solve_max_min(problem)
        snrs = a * np.asarray(alloc.powers)
        deliveries: dict[tuple[int, int], int] = {}
        for j in range(cfg.num_users):
            if not decode_indicator(float(snrs[j]), cfg.rf.snr_threshold):
                continue
            capacity_bits = alloc.rates[j] * cfg.slot_duration_s
            sent = self.queue.schedule_for_user(j, cfg.scheduling, capacity_bits, self._sched_rng)
            if sent:
                tx_delay = transfer_delay(
                    sum(p.size_bits for p in sent), alloc.rates[j], cfg.slot_duration_s
                )
                for p in sent:
                    # a packet's delivery delay is its whole HAP sojourn: queue
                    # wait plus this slot's transmission; a packet kept waiting
                    # carries correspondingly staler information
                    delay = (t - p.hap_arrival_time) + tx_delay
                    key = (p.source_satellite, j)
                    # two same-pair packets in one batch: the fresher one wins
                    if key not in deliveries or delay < deliveries[key]:
                        deliveries[key] = delay
        self.ledger.advance_users(deliveries, t)

        # 5. reward
        sum_age = float(self.ledger.per_satellite_user_age().sum())
        penalty_base = (
            float(self.handovers.handover_count)
            if cfg.handover_penalty == "cumulative"
            else float(switched)
        )
        reward_aoi = -cfg.aoi_weight * sum_age
        reward_handover = -cfg.reward_handover_weight * penalty_base
        reward_rate = cfg.rate_weight * float(np.sum(alloc.rates))
        reward = reward_aoi + reward_handover + reward_rate

        # 6. advance
        self.slot = t
        self._positions = constellation_positions(self.elements, t, cfg.slot_duration_s)
        self._visible = visible_set(self._positions, self.hap_position, cfg.min_elevation_deg * DEG)
        self._done = t >= cfg.episode_slots
        state = self._make_state()

        self.event_log.append(
            SlotEvents(
                slot=t,
                generated=generated.copy(),
                relay_served=relay_served,
                relay_delay=relay_delay,
                deliveries=dict(deliveries),
            )
        )
        record: dict[str, Any] = {
            "slot": t,
            "selection": -1 if selection is None else selection,
            "handover_count": self.handovers.handover_count,
            "z_hap": int(z_hap),
            "invalid_action": int(invalid),
            "queue_len": len(self.queue),
            "dropped": len(dropped),
            "sum_age": sum_age,
            "min_rate": alloc.min_rate,
            "reward": reward,
            "reward_aoi": reward_aoi,
            "reward_handover": reward_handover,
            "reward_rate": reward_rate,
        }
        for j in range(cfg.num_users):
            record[f"rate_{j}"] = alloc.rates[j]
        for j in range(cfg.num_users):
            record[f"power_{j}"] = alloc.powers[j]
        self.trace.append(record)

        info = {
            "invalid_action": invalid,
            "selection": selection,
            "switched": switched,
            "handover_count": self.handovers.handover_count,
            "z_hap": z_hap,
            "fso_snr": gamma_hap,
            "fso_rate": fso_rate,
            "relay_delay": relay_delay,
            "dropped": len(dropped),
            "queue_len": len(self.queue),
            "rates": list(alloc.rates),
            "powers": list(alloc.powers),
            "min_rate": alloc.min_rate,
            "sum_age": sum_age,
            "deliveries": {f"{i},{j}": d for (i, j), d in deliveries.items()},
        }
        return StepOutcome(
            reward=reward,
            reward_aoi=reward_aoi,
            reward_handover=reward_handover,
            reward_rate=reward_rate,
            state=state,
            done=self._done,
            info=info,
        )

    # -- reporting -----------------------------------------------------------

    def objective_report(self) -> dict[str, float]:
        """Episode objectives: f1 (time-averaged system age) and f2 (handovers)."""
        return {
            "f1": objective_freshness(self.ledger.user_age_history[1:]),
            "f2": float(self.handovers.handover_count),
            "total_reward": float(sum(r["reward"] for r in self.trace)),
        }


def default_config(**overrides: Any) -> SimConfig:
    """The stock scenario, optionally with field overrides."""
    return replace(SimConfig(), **overrides) if overrides else SimConfig()
