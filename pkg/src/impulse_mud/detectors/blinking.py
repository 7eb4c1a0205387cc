"""Blinking receiver: single-user matched filter over collision-free pulses."""
from __future__ import annotations

import numpy as np

from ..channel import SlotMatrix, SystemParams, collision_vector
from .graph import DetectionResult


def blinking_statistic(samples, slot: SlotMatrix, user: int) -> tuple[float, int]:
    """Sum of ``user``'s collision-free matched-filter outputs and how many there were."""
    clear = collision_vector(slot, user) == 0
    rows = slot.user_rows(user)[clear]
    return float(np.asarray(samples.samples)[rows].sum()), int(clear.sum())


def detect_blinking(samples, slot: SlotMatrix, params: SystemParams, user: int) -> int:
    """Hard bit for ``user``; 0 (symbol +1) when every pulse collided."""
    if not 0 <= user < params.users:
        raise IndexError(f"user {user} out of range for K={params.users}")
    stat, _ = blinking_statistic(samples, slot, user)
    return int(stat < 0)


def detect_blinking_all(samples, slot: SlotMatrix, params: SystemParams) -> DetectionResult:
    """All users at once; ``erasures`` flags users with no clean pulse."""
    r = np.asarray(samples.samples)
    load = slot.load
    users, rows = np.nonzero(slot.entries.T)
    clean = load[rows] == 1
    stat = np.bincount(users, weights=r[rows] * clean, minlength=params.users)
    survivors = np.bincount(users, weights=clean, minlength=params.users)
    return DetectionResult(
        decisions=(stat < 0).astype(np.uint8)[:, None],
        iterations_run=1,
        erasures=survivors == 0,
    )
