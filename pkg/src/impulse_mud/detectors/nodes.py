"""Scalar message rules of the factor-graph detectors.

These are the reference forms of the node updates. The vectorised
kernels in ``_kernels``/``_fallback`` apply the same rules to every edge
of a graph at once and are tested against these.

LLR convention: ``l = log p(+1) / p(-1)``; symbol +1 carries bit 0.
"""
from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

CLAMP = 50.0
MAX_COLLIDING = 20


class EnumerationCapError(ValueError):
    """More colliding pulses in one slot than exhaustive enumeration allows."""


def clamp(llr):
    return np.clip(llr, -CLAMP, CLAMP)


def p_node_llr(
    y: float,
    own_amp: float,
    others: Sequence[tuple[float, float]],
    noise_std: float,
    cap: int = MAX_COLLIDING,
) -> float:
    """LLR sent from a slot observation to one of the pulses it holds.

    ``others`` holds ``(amplitude, incoming_llr)`` for every other pulse in
    the slot. All 2**J sign patterns of those pulses are marginalised,
    each weighted by ``exp(llr * (x + 1) / 2)``.
    """
    if noise_std <= 0:
        raise ValueError("noise_std must be positive")
    if len(others) > cap:
        raise EnumerationCapError(f"{len(others)} interfering pulses exceed the cap of {cap}")
    two_var = 2.0 * noise_std**2
    if not others:
        return float(np.clip(2.0 * own_amp * y / noise_std**2, -CLAMP, CLAMP))
    amps = np.array([a for a, _ in others], dtype=float)
    llrs = clamp(np.array([l for _, l in others], dtype=float))
    patterns = np.array(list(itertools.product((1.0, -1.0), repeat=len(others))))
    base = patterns @ amps
    log_w = ((patterns + 1.0) / 2.0) @ llrs
    num = logsumexp(-((y - own_amp - base) ** 2) / two_var + log_w)
    den = logsumexp(-((y + own_amp - base) ** 2) / two_var + log_w)
    return float(np.clip(num - den, -CLAMP, CLAMP))


def e_node_llr(incoming: Sequence[float], exclude: int | None = None) -> float:
    """Equality-constraint node: sum of the incoming LLRs.

    With ``exclude`` set, the message on that edge is left out (the
    extrinsic output for that edge).
    """
    return float(sum(l for i, l in enumerate(incoming) if i != exclude))


def b_variable_llr(incoming: Sequence[float], exclude: int | None = None) -> float:
    # a b-variable node is an equality node over its adjacent edges
    return e_node_llr(incoming, exclude)


def _boxplus(a: float, b: float) -> float:
    # log-domain form of 2 atanh(tanh(a/2) tanh(b/2)); stays exact when both saturate
    sign = math.copysign(1.0, a) * math.copysign(1.0, b) if a and b else 0.0
    return (sign * min(abs(a), abs(b))
            + math.log1p(math.exp(-abs(a + b))) - math.log1p(math.exp(-abs(a - b))))


def pc_node_llr(incoming: Sequence[float]) -> float:
    """Single parity check: ``2 atanh(prod tanh(l_j / 2))``.

    An empty check pins its bit, returning ``+CLAMP``.
    """
    out = CLAMP
    for i, l in enumerate(incoming):
        l = float(np.clip(l, -CLAMP, CLAMP))
        out = l if i == 0 else _boxplus(out, l)
    return float(np.clip(out, -CLAMP, CLAMP))


def hard_decision(llr):
    """Bits from LLRs; a zero LLR decides symbol +1 (bit 0)."""
    return (np.asarray(llr) < 0).astype(np.uint8)


def sgn(x):
    """Sign with ``sgn(0) = +1``."""
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)
