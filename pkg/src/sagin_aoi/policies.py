"""Baseline satellite-selection policies.

Each selector maps the observable slot state to a satellite index from the visible
set, or None when nothing is visible (the caller then holds the previous link).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class EwgWeights:
    """Weights of the greedy score; only their ratios matter."""

    aoi: float = 1.0
    buffer: float = 0.05
    handover: float = 2.0


def random_select(visible: Sequence[int], rng: np.random.Generator) -> int | None:
    """Uniform draw over the visible set."""
    if not visible:
        return None
    return int(visible[int(rng.integers(len(visible)))])


def rr_select(visible: Sequence[int], last_selection: int | None) -> int | None:
    """Round robin over satellite indices: smallest visible index strictly greater
    than the last selection, wrapping to the smallest visible."""
    if not visible:
        return None
    ordered = sorted(int(i) for i in visible)
    if last_selection is not None:
        for idx in ordered:
            if idx > last_selection:
                return idx
    return ordered[0]


def ewg_select(
    visible: Sequence[int],
    relay_age: np.ndarray,
    queue_length: int,
    last_selection: int | None,
    weights: EwgWeights = EwgWeights(),
) -> int | None:
    """Greedy cost minimizer over visible satellites.

    Serving a satellite collapses its relay-side age, so a candidate's cost charges
    the age it would leave unserved elsewhere (negated own age), the buffer
    pressure, and a switching charge:

        cost_i = -w_aoi * relay_age[i] + w_buffer * queue_length
                 + w_handover * 1{i != last_selection}

    The argmin therefore serves the stalest satellite unless switching to it does
    not buy at least the handover charge. Ties go to the lowest index; scaling all
    weights by a positive constant never changes the choice.

    The buffer term is identical for every candidate, so it cannot move the
    argmin; it is left out of the comparison below so that exact cost ties cannot
    be flipped by rounding against an unrelated buffer level.
    """
    if not visible:
        return None
    best_idx: int | None = None
    best_cost = np.inf
    for idx in sorted(int(i) for i in visible):
        cost = -weights.aoi * float(relay_age[idx]) + weights.handover * float(
            idx != last_selection
        )
        if cost < best_cost:
            best_cost = cost
            best_idx = idx
    return best_idx
