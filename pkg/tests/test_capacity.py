import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from impulse_mud import capacity as cap


def gauss_hermite_bawgn(snr, nodes=128):
    """Independent oracle: E[1 - log2(1 + exp(-2 a Y))], Y ~ N(a, 1)."""
    x, w = np.polynomial.hermite.hermgauss(nodes)
    a = math.sqrt(snr)
    y = a + math.sqrt(2.0) * x
    return float(np.sum(w * (1.0 - np.logaddexp(0.0, -2.0 * a * y) / math.log(2.0))) / math.sqrt(math.pi))


def test_erasure_probability():
    assert cap.erasure_probability(20, 3) == 0.0975
    assert cap.erasure_probability(20, 11) == pytest.approx(0.40126, abs=1e-5)
    assert cap.erasure_probability(7, 1) == 0.0
    with pytest.raises(ValueError):
        cap.erasure_probability(0, 3)


def test_erasure_monotone():
    for nc in (5, 20):
        values = [cap.erasure_probability(nc, k) for k in range(1, 30)]
        assert all(a < b for a, b in zip(values, values[1:]))
    values = [cap.erasure_probability(nc, 5) for nc in range(2, 40)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_high_snr():
    assert cap.capacity_high_snr(20, 3) == 0.9025
    assert cap.capacity_high_snr(20, 11) == pytest.approx(0.59873, abs=1e-5)
    assert cap.capacity_high_snr(20, 1) == 1.0


def test_q_function():
    assert cap.q_function(0.0) == 0.5
    assert cap.q_function(8.0) < 1e-15
    assert cap.q_function(1.0) == pytest.approx(0.15865525393145707, abs=1e-15)


def test_binary_entropy():
    assert cap.binary_entropy(0.5) == 1.0
    assert cap.binary_entropy(0.0) == 0.0
    assert cap.binary_entropy(0.11) == pytest.approx(0.4999159, abs=1e-7)
    with pytest.raises(ValueError):
        cap.binary_entropy(1.5)


def test_capacity_hard():
    assert cap.capacity_hard(0.0, 0.0) == 1.0
    assert cap.capacity_hard(0.5, 0.3) == 0.0
    mu = cap.q_function(math.sqrt(2 * 10**0.4))
    assert cap.capacity_hard(mu, 0.0975) == pytest.approx((1 - cap.binary_entropy(mu)) * 0.9025)
    for nc, k in [(20, 3), (10, 7)]:
        assert cap.capacity_hard(0.0, cap.erasure_probability(nc, k)) == pytest.approx(cap.capacity_high_snr(nc, k))


def test_bawgn():
    assert cap.capacity_bawgn(1e-6) < 1e-5
    assert cap.capacity_bawgn(64.0) == pytest.approx(1.0, abs=1e-6)
    assert cap.capacity_bawgn(1.0) == pytest.approx(gauss_hermite_bawgn(1.0), abs=1e-6)
    grid = np.geomspace(1e-3, 40.0, 50)
    values = [cap.capacity_bawgn(s) for s in grid]
    assert all(a < b for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        cap.capacity_bawgn(0.0)


def test_soft():
    assert cap.capacity_soft(1.0, 3.0) == 0.0
    assert cap.capacity_soft(0.0, 3.0) == cap.capacity_bawgn(3.0)
    assert cap.capacity_soft(cap.erasure_probability(20, 3), 1.0) == pytest.approx(0.9025 * 0.48594415, abs=1e-8)


@given(st.floats(0.0, 1.0), st.floats(0.01, 30.0))
def test_soft_dominates_hard(e, snr):
    mu = cap.q_function(math.sqrt(snr))
    assert cap.capacity_soft(e, snr) >= cap.capacity_hard(mu, e) - 1e-12


def test_throughput():
    assert cap.system_throughput(32, 0.46) == 14.72
    assert cap.system_throughput(1, 1.0) == 1.0
    assert cap.within_throughput_bound(32, 0.46, 20)
    assert not cap.within_throughput_bound(30, 1.0, 20)
    with pytest.raises(ValueError):
        cap.system_throughput(3, 0.0)


def test_blinking_formula():
    # single user: plain matched filter over frames pulses
    assert cap.blinking_error_probability(20, 1, 3, 1.0) == pytest.approx(cap.q_function(math.sqrt(3)))
    # every pulse collides when there is only one chip
    assert cap.blinking_error_probability(1, 2, 3, 5.0) == pytest.approx(0.5)


def test_channel_point():
    cap.ChannelPoint(0.1, 0.2, 1.0)
    with pytest.raises(ValueError):
        cap.ChannelPoint(0.1, 0.7, 1.0)
