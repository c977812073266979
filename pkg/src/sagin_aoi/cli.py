"""Command line front end.

Subcommands:
  run    roll out a heuristic policy for N episodes; write trace.csv + summary.csv
  serve  run the wire-protocol server (TCP host:port, or stdio)
  eval   replay the selection column of a recorded trace; write a fresh trace
  sweep  grid over scenario knobs (users / scheduling / tag); one summary row per cell
  oracle self-check: power allocator vs brute-force grid, age ledger vs replay

Flag values override the config file, which overrides built-in defaults.
"""
from __future__ import annotations

import argparse
import itertools
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .aoi import objective_freshness
from .config import RUN_POLICY_NAMES, ConfigError, RunConfig, load_run_config
from .env import SimConfig
from .hap_queue import SchedulingPolicy
from .metrics import (
    aggregate_summary,
    episode_summary_row,
    read_csv,
    write_summary_csv,
    write_trace_csv,
)
from .power_alloc import PowerAllocProblem, brute_force_oracle, solve_max_min
from .protocol import ProtocolServer, serve_stdio
from .runner import run_episode
from .rng import substream


def _load(args: argparse.Namespace) -> RunConfig:
    config = load_run_config(args.config) if args.config else RunConfig()
    overrides: dict[str, Any] = {}
    for name in ("policy", "episodes", "seed", "out", "bind"):
        value = getattr(args, name, None)
        if value is not None:
            overrides["out_dir" if name == "out" else name] = value
    return replace(config, **overrides) if overrides else config


def _out_dir(config: RunConfig) -> Path:
    path = Path(config.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _run_episodes(
    sim: SimConfig,
    policy: str,
    episodes: int,
    base_seed: int,
    weights: Any,
    actions_by_episode: dict[int, list[int]] | None = None,
) -> tuple[list[dict[str, Any]], list[dict[str, Any]]]:
    trace_rows: list[dict[str, Any]] = []
    summary_rows: list[dict[str, Any]] = []
    for ep in range(episodes):
        actions = actions_by_episode.get(ep) if actions_by_episode is not None else None
        result = run_episode(sim, policy, base_seed + ep, weights, actions=actions)
        for record in result.records:
            trace_rows.append({"episode": ep, **record})
        summary_rows.append(episode_summary_row(result, ep))
    return trace_rows, summary_rows


def _print_aggregate(summary_rows: list[dict[str, Any]]) -> None:
    agg = aggregate_summary(summary_rows)
    print(
        f"episodes {int(agg['episodes'])}: "
        f"f1 {agg['f1_mean']:.6g} +- {agg['f1_std']:.3g}, "
        f"f2 {agg['f2_mean']:.6g} +- {agg['f2_std']:.3g}, "
        f"reward {agg['total_reward_mean']:.6g} +- {agg['total_reward_std']:.3g}"
    )


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load(args)
    out = _out_dir(config)
    trace_rows, summary_rows = _run_episodes(
        config.sim, config.policy, config.episodes, config.seed, config.ewg
    )
    write_trace_csv(out / "trace.csv", trace_rows, config.sim.num_users)
    write_summary_csv(out / "summary.csv", summary_rows)
    print(f"wrote {out / 'trace.csv'} and {out / 'summary.csv'}")
    _print_aggregate(summary_rows)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    config = _load(args)
    if config.bind == "stdio":
        serve_stdio(config.sim)
        return 0
    host, _, port_text = config.bind.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"error: bind must be HOST:PORT or 'stdio', got {config.bind!r}", file=sys.stderr)
        return 2
    server = ProtocolServer(config.sim, host, int(port_text))
    host, port = server.endpoint
    # flush so a parent process watching the pipe sees the endpoint immediately
    print(f"serving protocol 1 on {host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    config = _load(args)
    out = _out_dir(config)
    rows = read_csv(args.trace)
    if not rows:
        print(f"error: trace {args.trace} is empty", file=sys.stderr)
        return 1
    actions_by_episode: dict[int, list[int]] = {}
    for row in sorted(rows, key=lambda r: (r["episode"], r["slot"])):
        actions_by_episode.setdefault(int(row["episode"]), []).append(int(row["selection"]))
    episodes = len(actions_by_episode)
    trace_rows, summary_rows = _run_episodes(
        config.sim, config.policy, episodes, config.seed, config.ewg, actions_by_episode
    )
    write_trace_csv(out / "eval_trace.csv", trace_rows, config.sim.num_users)
    write_summary_csv(out / "eval_summary.csv", summary_rows)
    print(f"replayed {episodes} episode(s) from {args.trace}")
    _print_aggregate(summary_rows)
    return 0


def _parse_sweep_spec(spec: str) -> dict[str, list[str]]:
    """'users=1..4;scheduling=fifo,ldf;tag=m4' -> {'users': ['1','2','3','4'], ...}"""
    dims: dict[str, list[str]] = {}
    for part in filter(None, (p.strip() for p in spec.split(";"))):
        key, eq, body = part.partition("=")
        key = key.strip()
        if not eq or key not in ("users", "scheduling", "tag"):
            raise ValueError(
                f"bad sweep dimension {part!r}; expected users=..., scheduling=... or tag=..."
            )
        if ".." in body:
            lo, _, hi = body.partition("..")
            values = [str(v) for v in range(int(lo), int(hi) + 1)]
        else:
            values = [v.strip() for v in body.split(",") if v.strip()]
        if not values:
            raise ValueError(f"empty sweep dimension {part!r}")
        dims[key] = values
    if not dims:
        raise ValueError("empty sweep spec")
    return dims


SWEEP_COLUMNS = (
    "users",
    "scheduling",
    "tag",
    "episodes",
    "f1_mean",
    "f1_std",
    "f2_mean",
    "f2_std",
    "reward_mean",
    "reward_std",
)


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _load(args)
    out = _out_dir(config)
    try:
        dims = _parse_sweep_spec(args.sweep)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    users_values = [int(v) for v in dims.get("users", [str(config.sim.num_users)])]
    sched_values = dims.get("scheduling", [config.sim.scheduling.value])
    tag_values = dims.get("tag", ["-"])
    rows: list[dict[str, Any]] = []
    for users, sched, tag in itertools.product(users_values, sched_values, tag_values):
        sim = replace(config.sim, num_users=users, scheduling=SchedulingPolicy(sched))
        _, summary_rows = _run_episodes(
            sim, config.policy, config.episodes, config.seed, config.ewg
        )
        agg = aggregate_summary(summary_rows)
        rows.append(
            {
                "users": users,
                "scheduling": sched,
                "tag": tag,
                "episodes": config.episodes,
                "f1_mean": agg["f1_mean"],
                "f1_std": agg["f1_std"],
                "f2_mean": agg["f2_mean"],
                "f2_std": agg["f2_std"],
                "reward_mean": agg["total_reward_mean"],
                "reward_std": agg["total_reward_std"],
            }
        )
        print(
            f"users={users} scheduling={sched} tag={tag}: "
            f"f1 {agg['f1_mean']:.6g} f2 {agg['f2_mean']:.6g}"
        )
    write_summary_csv(out / "sweep.csv", rows, SWEEP_COLUMNS)
    print(f"wrote {out / 'sweep.csv'} ({len(rows)} cells)")
    return 0


def _replay_ages(events: list, n_sats: int, n_users: int) -> list[np.ndarray]:
    """Independent pure-Python replay of the three age recursions from events."""
    theta = [0] * n_sats
    delta = [0] * n_sats
    age = [[0] * n_users for _ in range(n_sats)]
    theta_hist = [list(theta)]
    delta_hist = [list(delta)]
    age_hist = [[row[:] for row in age]]
    for ev in events:
        theta = [0 if ev.generated[i] else theta[i] + 1 for i in range(n_sats)]
        theta_hist.append(list(theta))
        new_delta = []
        for i in range(n_sats):
            if ev.relay_served == i:
                snap = theta_hist[max(ev.slot - ev.relay_delay, 0)][i]
                new_delta.append(snap + ev.relay_delay)
            else:
                new_delta.append(delta[i] + 1)
        delta = new_delta
        delta_hist.append(list(delta))
        new_age = [[age[i][j] + 1 for j in range(n_users)] for i in range(n_sats)]
        for (i, j), d in ev.deliveries.items():
            snap = delta_hist[max(ev.slot - d, 0)][i]
            new_age[i][j] = snap + d
        age = new_age
        age_hist.append([row[:] for row in age])
    return [np.array(a, dtype=float) for a in age_hist[1:]]


def _cmd_oracle(args: argparse.Namespace) -> int:
    config = _load(args)
    failures = 0

    # power allocator vs exhaustive grid, random 3-user instances
    rng = substream(config.seed, "oracle", "power")
    start = time.monotonic()
    worst_gap = 0.0
    n_instances = 50
    for _ in range(n_instances):
        problem = PowerAllocProblem(
            gains=tuple(float(g) for g in rng.uniform(0.05, 5.0, size=3)),
            bandwidths=(1.0e6,) * 3,
            p_min=0.1,
            p_max=5.0,
            p_total=6.0,
        )
        solved = solve_max_min(problem)
        grid = brute_force_oracle(problem, grid_points=40)
        slack = max(
            b * np.log2(1.0 + a * (problem.p_max - problem.p_min) / 39.0)
            for a, b in zip(problem.gains, problem.bandwidths)
        )
        gap = grid.min_rate - solved.min_rate
        worst_gap = max(worst_gap, gap)
        if gap > slack:
            failures += 1
    elapsed = time.monotonic() - start
    ok = failures == 0
    print(
        f"power allocator vs grid oracle: {'PASS' if ok else 'FAIL'} "
        f"({n_instances} instances, worst gap {worst_gap:.6g} bit/s, {elapsed:.2f}s)"
    )

    # age ledger vs independent replay on a full episode of the configured scenario
    result = run_episode(config.sim, "ewg", config.seed, config.ewg)
    replayed = _replay_ages(result.events, config.sim.num_satellites, config.sim.num_users)
    f1_replayed = objective_freshness(replayed)
    age_ok = f1_replayed == result.f1
    print(
        f"age ledger vs event replay: {'PASS' if age_ok else 'FAIL'} "
        f"(f1 {result.f1:.9g} vs replay {f1_replayed:.9g})"
    )
    return 0 if ok and age_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sagin-aoi",
        description="Deterministic satellite-HAP-user downlink simulator and harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", metavar="PATH", help="YAML run configuration")
        p.add_argument("--seed", type=int, metavar="N", help="base seed (episode e uses seed+e)")
        p.add_argument("--out", metavar="PATH", help="output directory")

    p_run = sub.add_parser("run", help="roll out a heuristic policy, write trace + summary")
    common(p_run)
    p_run.add_argument("--policy", choices=RUN_POLICY_NAMES)
    p_run.add_argument("--episodes", type=int, metavar="N")
    p_run.set_defaults(func=_cmd_run)

    p_serve = sub.add_parser("serve", help="serve the environment wire protocol")
    common(p_serve)
    p_serve.add_argument("--bind", metavar="ADDR", help="HOST:PORT, or 'stdio'")
    p_serve.set_defaults(func=_cmd_serve)

    p_eval = sub.add_parser("eval", help="replay recorded selections through the environment")
    common(p_eval)
    p_eval.add_argument("--trace", required=True, metavar="PATH", help="trace.csv from a run")
    p_eval.set_defaults(func=_cmd_eval)

    p_sweep = sub.add_parser("sweep", help="grid over users/scheduling/tag")
    common(p_sweep)
    p_sweep.add_argument("--policy", choices=RUN_POLICY_NAMES)
    p_sweep.add_argument("--episodes", type=int, metavar="N")
    p_sweep.add_argument(
        "--sweep",
        default="users=1..10",
        metavar="SPEC",
        help="semicolon-separated dims, e.g. 'users=1..10;scheduling=fifo,ldf;tag=m4'",
    )
    p_sweep.set_defaults(func=_cmd_sweep)

    p_oracle = sub.add_parser("oracle", help="self-check solver and age ledger; nonzero on failure")
    common(p_oracle)
    p_oracle.set_defaults(func=_cmd_oracle)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
