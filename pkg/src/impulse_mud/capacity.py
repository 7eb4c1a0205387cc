"""Capacity of the collision-as-erasure channel seen by one TH-IR user.

All capacities are in bits per channel use (per pulse).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, stats
from scipy.special import erfc


@dataclass(frozen=True)
class ChannelPoint:
    erasure_prob: float
    crossover: float
    snr_linear: float

    def __post_init__(self):
        if not 0 <= self.erasure_prob <= 1:
            raise ValueError("erasure probability must lie in [0, 1]")
        if not 0 <= self.crossover <= 0.5:
            raise ValueError("crossover probability must lie in [0, 1/2]")
        if self.snr_linear <= 0:
            raise ValueError("snr must be positive")


def _check_system(nc: int, k_users: int) -> None:
    if nc < 1 or k_users < 1:
        raise ValueError("nc and k_users must be positive")


def erasure_probability(nc: int, k_users: int) -> float:
    """Probability that at least one of the other K-1 users hits a given chip."""
    _check_system(nc, k_users)
    # exact rational arithmetic so that e.g. (20, 3) gives 0.0975 to the last bit
    return float(1 - (1 - Fraction(1, nc)) ** (k_users - 1))


def capacity_high_snr(nc: int, k_users: int) -> float:
    _check_system(nc, k_users)
    return float((1 - Fraction(1, nc)) ** (k_users - 1))


def q_function(x: float) -> float:
    return 0.5 * float(erfc(x / math.sqrt(2.0)))


def binary_entropy(p: float) -> float:
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def capacity_hard(mu: float, e: float) -> float:
    """Binary erasure channel with crossover: ``(1 - h(mu)) (1 - e)``."""
    if not 0 <= mu <= 0.5:
        raise ValueError("mu must lie in [0, 1/2]")
    if not 0 <= e <= 1:
        raise ValueError("e must lie in [0, 1]")
    return (1 - binary_entropy(mu)) * (1 - e)


def _log2_ratio(y, a):
    # log2 p(y|+A) / p(y) for unit noise, p(y) the equiprobable mixture
    return (math.log(2.0) - np.logaddexp(0.0, -2.0 * a * y)) / math.log(2.0)


def capacity_bawgn(snr_linear: float) -> float:
    """Binary-input AWGN capacity at ``snr_linear = A**2 / sigma**2``.

    By symmetry both halves of the mutual-information integral are equal,
    so only the +A half is integrated, over ``[-A - 10, A + 10]``.
    """
    if snr_linear <= 0:
        raise ValueError("snr must be positive")
    a = math.sqrt(snr_linear)

    def integrand(y):
        return math.exp(-((y - a) ** 2) / 2) / math.sqrt(2 * math.pi) * _log2_ratio(y, a)

    value, _ = integrate.quad(integrand, -a - 10.0, a + 10.0, epsabs=1e-11, epsrel=1e-11, limit=200)
    return min(max(value, 0.0), 1.0)


def capacity_soft(e: float, snr_linear: float) -> float:
    if not 0 <= e <= 1:
        raise ValueError("e must lie in [0, 1]")
    return (1 - e) * capacity_bawgn(snr_linear)


def blinking_error_probability(nc: int, k_users: int, frames: int, amp_over_sigma: float) -> float:
    """Bit error probability of the blinking receiver with random hopping.

    Each of the ``frames`` pulses survives independently with probability
    ``1 - e``; ``m`` survivors give ``Q(sqrt(m) A / sigma)``, and ``m = 0``
    is a coin flip.
    """
    if frames < 1:
        raise ValueError("frames must be positive")
    if amp_over_sigma < 0:
        raise ValueError("amplitude ratio must be non-negative")
    e = erasure_probability(nc, k_users)
    m = np.arange(frames + 1)
    weights = stats.binom.pmf(m, frames, 1 - e)
    return float(sum(w * q_function(math.sqrt(k) * amp_over_sigma) for k, w in zip(m, weights)))


def system_throughput(k_users: int, code_rate: float) -> float:
    """Aggregate information bits per frame for K users at a common code rate."""
    if not 0 < code_rate <= 1:
        raise ValueError("code rate must lie in (0, 1]")
    if k_users < 1:
        raise ValueError("k_users must be positive")
    return k_users * code_rate


def throughput_bound(nc: int) -> float:
    """Single-user upper bound: one bit per chip, ``Nc`` bits per frame."""
    return float(nc)


def within_throughput_bound(k_users: int, code_rate: float, nc: int) -> bool:
    return system_throughput(k_users, code_rate) <= throughput_bound(nc)
