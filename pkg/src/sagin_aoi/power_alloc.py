"""Max-min downlink power allocation for the HAP->user RF hop.

Per slot the HAP splits its transmit budget across users to maximize the minimum
Shannon rate min_j B_j*log2(1 + a_j*P_j), subject to a per-user power box
[P_min, P_max] and the total budget sum_j P_j <= P_total, where a_j = |h_j|^2 /
sigma_j^2 is the user's effective channel gain.

Each per-user rate is strictly increasing and concave in its own power, so the
pointwise minimum is concave and the optimum is found by bisecting on the common
rate R: the cheapest allocation supporting R needs P_j(R) = (2^(R/B_j) - 1) / a_j,
which is monotone in R, making feasibility a threshold property. Leftover budget at
the optimal waterline is spread equally over users with headroom (it cannot lower
the minimum, and it keeps the budget tight for the rate bonus downstream).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PowerAllocProblem:
    """One slot's allocation instance.

    Attributes:
        gains: effective channel gains a_j = |h_j|^2/sigma_j^2, all > 0 (1/W).
        bandwidths: per-user bandwidths B_j > 0 (Hz).
        p_min: per-user power floor (W), >= 0.
        p_max: per-user power cap (W), >= p_min.
        p_total: total budget (W); needs num_users * p_min <= p_total.
    """

    gains: tuple[float, ...]
    bandwidths: tuple[float, ...]
    p_min: float
    p_max: float
    p_total: float

    def __post_init__(self) -> None:
        if len(self.gains) != len(self.bandwidths) or not self.gains:
            raise ValueError("gains and bandwidths must be equal-length and nonempty")
        if any(g <= 0.0 for g in self.gains):
            raise ValueError("channel gains must be positive")
        if any(b <= 0.0 for b in self.bandwidths):
            raise ValueError("bandwidths must be positive")
        if not 0.0 <= self.p_min <= self.p_max:
            raise ValueError("need 0 <= p_min <= p_max")
        if len(self.gains) * self.p_min > self.p_total:
            raise ValueError("budget cannot cover the per-user floor")

    @property
    def num_users(self) -> int:
        return len(self.gains)

    def gain_array(self) -> np.ndarray:
        return np.asarray(self.gains, dtype=float)

    def bandwidth_array(self) -> np.ndarray:
        return np.asarray(self.bandwidths, dtype=float)


@dataclass(frozen=True)
class PowerAllocation:
    """Solver output: feasible powers with the rates they induce."""

    powers: tuple[float, ...]
    rates: tuple[float, ...]
    min_rate: float


def user_rates(problem: PowerAllocProblem, powers: np.ndarray) -> np.ndarray:
    """Per-user Shannon rates B_j*log2(1 + a_j*P_j) for a power vector."""
    return problem.bandwidth_array() * np.log2(1.0 + problem.gain_array() * np.asarray(powers, dtype=float))


def min_rate(problem: PowerAllocProblem, powers: np.ndarray) -> float:
    """The objective: minimum per-user rate of a power vector."""
    return float(np.min(user_rates(problem, powers)))


def required_powers(problem: PowerAllocProblem, common_rate: float) -> np.ndarray:
    """Cheapest powers giving every user at least ``common_rate``."""
    with np.errstate(over="ignore"):
        return (np.exp2(common_rate / problem.bandwidth_array()) - 1.0) / problem.gain_array()


def _supports_rate(problem: PowerAllocProblem, common_rate: float) -> bool:
    needed = required_powers(problem, common_rate)
    if np.any(needed > problem.p_max):
        return False
    return float(np.sum(np.maximum(needed, problem.p_min))) <= problem.p_total


def _spread_residual(problem: PowerAllocProblem, powers: np.ndarray) -> np.ndarray:
    """Distribute leftover budget equally over users with headroom, clipping at p_max."""
    powers = powers.copy()
    for _ in range(problem.num_users):
        residual = problem.p_total - float(np.sum(powers))
        if residual <= 1e-15 * problem.p_total:
            break
        headroom = problem.p_max - powers
        open_users = headroom > 0.0
        if not np.any(open_users):
            break
        share = residual / int(np.count_nonzero(open_users))
        powers[open_users] += np.minimum(share, headroom[open_users])
    return powers


def solve_max_min(
    problem: PowerAllocProblem, rate_tolerance: float | None = None
) -> PowerAllocation:
    """Bisection solver for the max-min rate allocation.

    ``rate_tolerance`` is the bisection stopping width in bit/s; it defaults to
    1e-6 times the upper bracket (the best user's rate at p_max).
    """
    gains = problem.gain_array()
    bands = problem.bandwidth_array()
    lo = float(np.min(bands * np.log2(1.0 + gains * problem.p_min)))
    hi = float(np.max(bands * np.log2(1.0 + gains * problem.p_max)))
    if rate_tolerance is None:
        rate_tolerance = 1e-6 * max(hi, 1.0)
    # lo is always supportable: everyone at p_min meets it and fits the budget.
    while hi - lo > rate_tolerance:
        mid = 0.5 * (lo + hi)
        if _supports_rate(problem, mid):
            lo = mid
        else:
            hi = mid
    powers = np.clip(required_powers(problem, lo), problem.p_min, problem.p_max)
    powers = _spread_residual(problem, powers)
    # Guard the budget against accumulated roundoff before reporting rates.
    excess = float(np.sum(powers)) - problem.p_total
    if excess > 0.0:
        powers -= excess / problem.num_users
        powers = np.maximum(powers, problem.p_min)
    rates = user_rates(problem, powers)
    return PowerAllocation(
        powers=tuple(float(p) for p in powers),
        rates=tuple(float(r) for r in rates),
        min_rate=float(np.min(rates)),
    )


def brute_force_oracle(problem: PowerAllocProblem, grid_points: int = 25) -> PowerAllocation:
    """Exhaustive grid search over the power box, for cross-checking the solver.

    Evaluates every combination of ``grid_points`` levels per user inside
    [p_min, p_max] that respects the budget and returns the best by min-rate
    (first hit wins ties, so the result is deterministic). Exponential in the
    number of users; refuses more than 4.
    """
    if problem.num_users > 4:
        raise ValueError("oracle is exhaustive; use at most 4 users")
    levels = np.linspace(problem.p_min, problem.p_max, grid_points)
    gains = problem.gain_array()
    bands = problem.bandwidth_array()
    best_powers: tuple[float, ...] | None = None
    best_rate = -np.inf
    budget = problem.p_total * (1.0 + 1e-12)
    for combo in itertools.product(levels, repeat=problem.num_users):
        if sum(combo) > budget:
            continue
        rate = float(np.min(bands * np.log2(1.0 + gains * np.asarray(combo))))
        if rate > best_rate:
            best_rate = rate
            best_powers = combo
    if best_powers is None:
        raise ValueError("no feasible grid point; check the budget")
    rates = user_rates(problem, np.asarray(best_powers))
    return PowerAllocation(
        powers=tuple(float(p) for p in best_powers),
        rates=tuple(float(r) for r in rates),
        min_rate=float(np.min(rates)),
    )
