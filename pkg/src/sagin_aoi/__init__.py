"""sagin-aoi: discrete-time simulator and evaluation harness for an AoI-aware
HAP-relayed LEO satellite downlink."""

from .aoi import AoiLedger, PacketGenProcess, objective_freshness, transfer_delay
from .channel import FsoLinkParams, RfLinkParams
from .config import ConfigError, RunConfig, load_run_config, parse_run_config, save_run_config
from .env import (
    EnvState,
    SaginEnv,
    SatelliteSpec,
    SimConfig,
    StepOutcome,
    default_config,
    generate_constellation,
    state_schema,
)
from .hap_queue import BufferQueue, Packet, SchedulingPolicy
from .metrics import read_csv, write_summary_csv, write_trace_csv
from .orbital import HandoverLedger, OrbitalElements, PhysicalConstants
from .policies import EwgWeights, ewg_select, random_select, rr_select
from .power_alloc import (
    PowerAllocProblem,
    PowerAllocation,
    brute_force_oracle,
    solve_max_min,
)
from .protocol import PROTOCOL_VERSION, EnvClient, EnvSession, ProtocolError, ProtocolServer
from .runner import EpisodeResult, evaluate, run_episode

__version__ = "0.1.0"

__all__ = [
    "AoiLedger",
    "BufferQueue",
    "ConfigError",
    "EnvClient",
    "EnvSession",
    "EnvState",
    "EpisodeResult",
    "EwgWeights",
    "FsoLinkParams",
    "HandoverLedger",
    "OrbitalElements",
    "PROTOCOL_VERSION",
    "Packet",
    "PacketGenProcess",
    "PhysicalConstants",
    "PowerAllocProblem",
    "PowerAllocation",
    "ProtocolError",
    "ProtocolServer",
    "RfLinkParams",
    "RunConfig",
    "SaginEnv",
    "SatelliteSpec",
    "SchedulingPolicy",
    "SimConfig",
    "StepOutcome",
    "brute_force_oracle",
    "default_config",
    "evaluate",
    "ewg_select",
    "generate_constellation",
    "load_run_config",
    "objective_freshness",
    "parse_run_config",
    "random_select",
    "read_csv",
    "rr_select",
    "run_episode",
    "save_run_config",
    "solve_max_min",
    "state_schema",
    "transfer_delay",
    "write_summary_csv",
    "write_trace_csv",
]
