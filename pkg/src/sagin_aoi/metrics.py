"""CSV persistence for per-slot traces and per-episode summaries.

Column order is fixed, floats carry 9 significant digits, and rows are written
with bare "\n" terminators, so a file is a deterministic function of its
records and byte-comparable across platforms and processes.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

# Integer-valued trace fields; everything else in a trace row is a float.
_TRACE_INT_FIELDS = {
    "episode",
    "slot",
    "selection",
    "handover_count",
    "z_hap",
    "invalid_action",
    "queue_len",
    "dropped",
}

TRACE_BASE_COLUMNS = (
    "episode",
    "slot",
    "selection",
    "handover_count",
    "z_hap",
    "invalid_action",
    "queue_len",
    "dropped",
    "sum_age",
    "min_rate",
    "reward",
    "reward_aoi",
    "reward_handover",
    "reward_rate",
)

SUMMARY_COLUMNS = ("episode", "seed", "policy", "f1", "f2", "total_reward")


def trace_columns(num_users: int) -> tuple[str, ...]:
    """Trace header for a scenario: base fields then per-user rate and power."""
    per_user = [f"rate_{j}" for j in range(num_users)] + [f"power_{j}" for j in range(num_users)]
    return TRACE_BASE_COLUMNS + tuple(per_user)


def format_value(value: Any) -> str:
    """One CSV cell: ints verbatim, floats with 9 significant digits."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if value == 0.0:  # -0.0 would print as "-0" and break round-trip stability
            return "0"
        return f"{value:.9g}"
    return str(value)


def _write_rows(
    path: str | Path, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]
) -> None:
    target = Path(path)
    try:
        with target.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(row[c]) for c in columns])
    except OSError as exc:
        raise OSError(f"cannot write metrics file {target}: {exc}") from exc


def write_trace_csv(
    path: str | Path, records: Sequence[Mapping[str, Any]], num_users: int
) -> None:
    """Per-slot trace; records need an ``episode`` key plus the env trace fields."""
    _write_rows(path, trace_columns(num_users), records)


def write_summary_csv(
    path: str | Path,
    rows: Sequence[Mapping[str, Any]],
    columns: Sequence[str] = SUMMARY_COLUMNS,
) -> None:
    """One row per episode (or per sweep cell, with caller-chosen columns)."""
    _write_rows(path, columns, rows)


def _parse_cell(name: str, text: str) -> Any:
    if name in _TRACE_INT_FIELDS:
        return int(text)
    try:
        return int(text) if text.isdigit() or (text[:1] == "-" and text[1:].isdigit()) else float(text)
    except ValueError:
        return text


def read_csv(path: str | Path) -> list[dict[str, Any]]:
    """Read any metrics CSV back into typed dicts (ints, floats, else strings)."""
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        return [{k: _parse_cell(k, v) for k, v in row.items()} for row in reader]


def trace_to_csv_text(records: Sequence[Mapping[str, Any]], num_users: int) -> str:
    """The exact bytes write_trace_csv would produce, as a string."""
    columns = trace_columns(num_users)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in records:
        writer.writerow([format_value(row[c]) for c in columns])
    return buf.getvalue()


def episode_summary_row(result: Any, episode: int) -> dict[str, Any]:
    """Summary row for one EpisodeResult."""
    return {
        "episode": episode,
        "seed": result.seed,
        "policy": result.policy,
        "f1": result.f1,
        "f2": result.f2,
        "total_reward": result.total_reward,
    }


def aggregate_summary(rows: Sequence[Mapping[str, Any]]) -> dict[str, float]:
    """Mean and population-std of f1, f2 and total_reward over summary rows."""
    import numpy as np

    out: dict[str, float] = {"episodes": float(len(rows))}
    for key in ("f1", "f2", "total_reward"):
        vals = np.array([float(r[key]) for r in rows])
        out[f"{key}_mean"] = float(vals.mean())
        out[f"{key}_std"] = float(vals.std())
    return out
