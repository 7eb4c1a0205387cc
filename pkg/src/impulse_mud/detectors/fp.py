"""Two-stage turbo detector: pulse detection followed by symbol detection.

Written in the pulse/symbol view (one loop per user pulse, priors as
probabilities) rather than on the flat edge arrays, so it serves as an
independent cross-check of :func:`detect_fg3`.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .graph import DetectionResult, DetectorGraph
from .iterative import _noise_var, _samples
from .nodes import CLAMP, MAX_COLLIDING, EnumerationCapError, hard_decision


def _log_sigmoid(x: float) -> float:
    # log P(b = +1) for an LLR x
    return -math.log1p(math.exp(-x)) if x >= 0 else x - math.log1p(math.exp(x))


def _pulse_llr(r: float, own: float, colliders, noise_var: float) -> float:
    """log f(r | b=+1) / f(r | b=-1) with colliders' symbols averaged out.

    ``colliders`` holds (amplitude, prior LLR) pairs; the prior of each
    pattern is the product of the colliders' symbol probabilities.
    """
    if not colliders:
        return 2.0 * own * r / noise_var
    log_num = []
    log_den = []
    for bits in itertools.product((1.0, -1.0), repeat=len(colliders)):
        interference = 0.0
        log_prior = 0.0
        for (a, lam), b in zip(colliders, bits):
            interference += a * b
            log_prior += _log_sigmoid(b * lam)
        log_num.append(-((r - own - interference) ** 2) / (2 * noise_var) + log_prior)
        log_den.append(-((r + own - interference) ** 2) / (2 * noise_var) + log_prior)
    return float(np.logaddexp.reduce(log_num) - np.logaddexp.reduce(log_den))


def detect_fp(
    graph: DetectorGraph, samples, iterations: int = 8, *, cap: int = MAX_COLLIDING, trace: list | None = None
) -> DetectionResult:
    """Alternate pulse-stage and symbol-stage extrinsic LLRs.

    The pulse stage evaluates each pulse's likelihood ratio given the
    colliding users' symbol-stage priors; the symbol stage returns to each
    pulse the sum of its user's other pulse LLRs.
    """
    r, noise_std = _samples(samples)
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    var = _noise_var(graph, noise_std)
    users, frames = graph.user_edges.shape
    amps = graph.params.amplitudes
    sample = np.asarray(r, dtype=float)
    # pulses sharing each (user, frame) slot
    slot_of = graph.edge_node[graph.user_edges]
    occupants: dict[int, list[int]] = {}
    for k in range(users):
        for f in range(frames):
            occupants.setdefault(int(slot_of[k, f]), []).append(k)
    if max((len(v) for v in occupants.values()), default=1) - 1 > cap:
        raise EnumerationCapError(f"collision count exceeds the cap of {cap}")
    rows = graph.node_rows[slot_of]
    lam1 = np.zeros((users, frames))
    lam2 = np.zeros((users, frames))
    for _ in range(iterations):
        for k in range(users):
            for f in range(frames):
                others = [
                    (amps[m], float(np.clip(lam2[m, f], -CLAMP, CLAMP)))
                    for m in occupants[int(slot_of[k, f])]
                    if m != k
                ]
                lam1[k, f] = np.clip(_pulse_llr(sample[rows[k, f]], amps[k], others, var), -CLAMP, CLAMP)
        lam2 = lam1.sum(axis=1, keepdims=True) - lam1
        if trace is not None:
            trace.append((lam1.copy(), np.clip(lam2, -CLAMP, CLAMP)))
    llrs = lam1.sum(axis=1, keepdims=True)
    return DetectionResult(decisions=hard_decision(llrs), llrs=llrs, iterations_run=iterations)
