"""Run configuration: a YAML file describing the scenario plus run options.

The file mirrors the dataclass tree: a ``sim`` mapping with the SimConfig
fields (nested ``fso``, ``rf``, ``constants``, optional ``constellation`` list
and ``scheduling`` name), an ``ewg`` mapping with the greedy-policy weights,
and top-level run options (policy, episodes, seed, out_dir, bind). Every key
is optional and falls back to the dataclass default; unknown keys are rejected
with their full dotted path so typos cannot silently revert a field to its
default.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .channel import FsoLinkParams, RfLinkParams
from .env import SatelliteSpec, SimConfig
from .hap_queue import SchedulingPolicy
from .orbital import PhysicalConstants
from .policies import EwgWeights

RUN_POLICY_NAMES = ("random", "rr", "ewg")


class ConfigError(ValueError):
    """Malformed run configuration; message carries the dotted key path."""


@dataclass(frozen=True)
class RunConfig:
    """Scenario plus everything needed to reproduce a run from the command line."""

    sim: SimConfig = field(default_factory=SimConfig)
    ewg: EwgWeights = field(default_factory=EwgWeights)
    policy: str = "ewg"
    episodes: int = 1
    seed: int = 0
    out_dir: str = "results"
    bind: str = "127.0.0.1:9732"

    def __post_init__(self) -> None:
        if self.policy not in RUN_POLICY_NAMES:
            raise ConfigError(f"policy must be one of {RUN_POLICY_NAMES}, got {self.policy!r}")
        if self.episodes < 1:
            raise ConfigError("episodes must be >= 1")


# Dataclasses reachable from RunConfig that are built field-by-field from
# nested mappings. SatelliteSpec rides along for the constellation list.
_NESTED = {
    SimConfig,
    FsoLinkParams,
    RfLinkParams,
    PhysicalConstants,
    EwgWeights,
    SatelliteSpec,
    RunConfig,
}


def _convert_scalar(value: Any, target: type, path: str) -> Any:
    if target is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if target is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return int(value)
    if target is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    raise ConfigError(f"{path}: unsupported value {value!r}")


def _convert(value: Any, field_name: str, target: Any, path: str) -> Any:
    if field_name == "scheduling":
        try:
            return SchedulingPolicy(str(value).lower())
        except ValueError as exc:
            raise ConfigError(
                f"{path}: unknown scheduling policy {value!r}; "
                f"expected one of {[p.value for p in SchedulingPolicy]}"
            ) from exc
    if field_name == "constellation":
        if value is None:
            return None
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected a list of satellite mappings")
        return tuple(
            _build_dataclass(SatelliteSpec, item, f"{path}[{k}]") for k, item in enumerate(value)
        )
    if field_name == "altitude_range_m":
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ConfigError(f"{path}: expected [low, high]")
        return (
            _convert_scalar(value[0], float, f"{path}[0]"),
            _convert_scalar(value[1], float, f"{path}[1]"),
        )
    if isinstance(target, type) and target in _NESTED:
        return _build_dataclass(target, value, path)
    if field_name in ("reward_aoi_weight", "reward_rate_weight"):
        return None if value is None else _convert_scalar(value, float, path)
    return _convert_scalar(value, target, path)


def _build_dataclass(cls: type, data: Any, path: str) -> Any:
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(data).__name__}")
    spec = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(spec))
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {unknown}; valid keys are {sorted(spec)}")
    kwargs = {}
    for name, value in data.items():
        f = spec[name]
        target = f.type if isinstance(f.type, type) else _FIELD_TYPES[cls, name]
        kwargs[name] = _convert(value, name, target, f"{path}.{name}")
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _resolve_field_types() -> dict[tuple[type, str], Any]:
    """Concrete per-field types; dataclass stores string annotations here."""
    import typing

    out: dict[tuple[type, str], Any] = {}
    for cls in _NESTED:
        hints = typing.get_type_hints(cls)
        for f in dataclasses.fields(cls):
            hint = hints[f.name]
            origin = typing.get_origin(hint)
            if origin is typing.Union:  # Optional[...] fields keep their inner type
                args = [a for a in typing.get_args(hint) if a is not type(None)]
                hint = args[0] if len(args) == 1 else hint
            out[cls, f.name] = hint
    return out


_FIELD_TYPES = _resolve_field_types()


def parse_run_config(data: dict[str, Any] | None) -> RunConfig:
    """Build a RunConfig from a parsed mapping; None (empty file) means defaults."""
    return _build_dataclass(RunConfig, data or {}, "config")


def load_run_config(path: str | Path) -> RunConfig:
    """Load and validate a YAML run configuration file."""
    text = Path(path).read_text()
    data = yaml.safe_load(text)
    if data is not None and not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return parse_run_config(data)


def run_config_to_dict(config: RunConfig) -> dict[str, Any]:
    """Plain-dict form of a RunConfig (enums as names); YAML-dumpable round trip."""

    def unpack(obj: Any) -> Any:
        if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            return {f.name: unpack(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        if isinstance(obj, SchedulingPolicy):
            return obj.value
        if isinstance(obj, tuple):
            return [unpack(v) for v in obj]
        return obj

    return unpack(config)


def save_run_config(config: RunConfig, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(run_config_to_dict(config), sort_keys=False))
