import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from impulse_mud.detectors import _backend
from impulse_mud.detectors.nodes import (
    CLAMP,
    EnumerationCapError,
    b_variable_llr,
    e_node_llr,
    hard_decision,
    p_node_llr,
    pc_node_llr,
    sgn,
)

finite = st.floats(-20, 20, allow_nan=False)
amp = st.floats(0.1, 3.0)


def p_oracle(y, own, others, sigma):
    """Probability-domain enumeration at 50 digits."""
    mpmath.mp.dps = 50
    y, own, sigma = mpmath.mpf(y), mpmath.mpf(own), mpmath.mpf(sigma)
    num = den = mpmath.mpf(0)
    for bits in itertools.product((1, -1), repeat=len(others)):
        interference = sum(a * b for (a, _), b in zip(others, bits))
        prior = mpmath.mpf(1)
        for (_, l), b in zip(others, bits):
            p_plus = 1 / (1 + mpmath.e ** (-mpmath.mpf(l)))
            prior *= p_plus if b == 1 else 1 - p_plus
        num += prior * mpmath.e ** (-((y - own - interference) ** 2) / (2 * sigma**2))
        den += prior * mpmath.e ** (-((y + own - interference) ** 2) / (2 * sigma**2))
    return float(mpmath.log(num / den))


def test_p_node_single_pulse():
    assert p_node_llr(0.7, 1.5, [], 0.8) == pytest.approx(2 * 1.5 * 0.7 / 0.64)


def test_p_node_known_interferer():
    # interferer certainly -1: same as the single-pulse rule with y + A1
    got = p_node_llr(0.3, 1.0, [(0.7, -CLAMP)], 0.9)
    assert got == pytest.approx(2 * 1.0 * (0.3 + 0.7) / 0.81, abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(finite.map(lambda v: v / 5), amp, st.lists(st.tuples(amp, finite), max_size=4), st.floats(0.3, 2.0))
def test_p_node_matches_oracle(y, own, others, sigma):
    expected = max(-CLAMP, min(CLAMP, p_oracle(y, own, others, sigma)))
    assert p_node_llr(y, own, others, sigma) == pytest.approx(expected, abs=1e-9, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(finite.map(lambda v: v / 5), amp, st.lists(st.tuples(amp, finite), max_size=4), st.floats(0.3, 2.0))
def test_p_node_joint_negation(y, own, others, sigma):
    flipped = [(a, -l) for a, l in others]
    assert p_node_llr(-y, own, flipped, sigma) == pytest.approx(-p_node_llr(y, own, others, sigma), abs=1e-9)


def test_p_node_cap_and_finiteness():
    with pytest.raises(EnumerationCapError):
        p_node_llr(0.0, 1.0, [(1.0, 0.0)] * 3, 1.0, cap=2)
    assert abs(p_node_llr(1e6, 1.0, [(1.0, 0.0)], 1e-3)) == CLAMP


def test_e_node():
    assert e_node_llr([]) == 0
    assert e_node_llr([1.0, 2.0, -0.5]) == 2.5
    assert e_node_llr([1.0, 2.0, -0.5], exclude=1) == 0.5
    assert b_variable_llr([0.5, 0.25], exclude=0) == 0.25


def test_pc_node():
    assert pc_node_llr([0.0, 3.0, -2.0]) == 0.0
    assert pc_node_llr([CLAMP, 1.7]) == pytest.approx(1.7, abs=1e-6)
    assert pc_node_llr([0.8, -1.3]) == pytest.approx(2 * math.atanh(math.tanh(0.4) * math.tanh(-0.65)), abs=1e-12)
    assert pc_node_llr([CLAMP, CLAMP]) == pytest.approx(CLAMP - math.log(2.0))
    assert pc_node_llr([]) == CLAMP


def test_hard_decision_and_sign():
    assert hard_decision([2.0, -1.0, 0.0]).tolist() == [0, 1, 0]
    assert sgn([0.0, -0.0, -2.0]).tolist() == [1.0, 1.0, -1.0]


def _random_csr(rng, nodes, max_degree):
    degree = rng.integers(1, max_degree + 1, nodes)
    ptr = np.concatenate([[0], np.cumsum(degree)])
    edges = ptr[-1]
    return ptr, rng.uniform(0.3, 2.0, edges), rng.normal(0, 4, edges)


def test_p_messages_match_scalar(rng, backend):
    kern = _backend.get(backend)
    ptr, amps, prior = _random_csr(rng, 40, 5)
    y = rng.normal(0, 2, 40)
    sigma = 0.7
    out = kern.p_messages(y, ptr, amps, prior, sigma**2, CLAMP, 20)
    for i in range(40):
        edges = range(ptr[i], ptr[i + 1])
        for t in edges:
            others = [(amps[e], prior[e]) for e in edges if e != t]
            assert out[t] == pytest.approx(p_node_llr(y[i], amps[t], others, sigma), abs=1e-9)


def test_p_messages_extrinsic(rng, backend):
    kern = _backend.get(backend)
    ptr, amps, prior = _random_csr(rng, 30, 4)
    y = rng.normal(0, 2, 30)
    base = kern.p_messages(y, ptr, amps, prior, 0.5, CLAMP, 20)
    for e in range(prior.size):
        bumped = prior.copy()
        bumped[e] += 3.0
        assert kern.p_messages(y, ptr, amps, bumped, 0.5, CLAMP, 20)[e] == pytest.approx(base[e], abs=1e-12)


def test_check_messages_match_scalar(rng, backend):
    kern = _backend.get(backend)
    ptr, _, v2c = _random_csr(rng, 30, 7)
    out = kern.check_messages(ptr, v2c, CLAMP)
    for c in range(30):
        edges = list(range(ptr[c], ptr[c + 1]))
        for t in edges:
            others = [v2c[e] for e in edges if e != t]
            expected = pc_node_llr(others) if others else CLAMP
            assert out[t] == pytest.approx(expected, abs=1e-8)


def test_backends_agree(rng):
    if _backend.compiled is None:
        pytest.skip("compiled kernels not built")
    ptr, amps, prior = _random_csr(rng, 500, 6)
    y = rng.normal(0, 2, 500)
    a = _backend.python.p_messages(y, ptr, amps, prior, 0.3, CLAMP, 20)
    b = _backend.compiled.p_messages(y, ptr, amps, prior, 0.3, CLAMP, 20)
    assert np.allclose(a, b, atol=1e-10)
    a = _backend.python.check_messages(ptr, prior, CLAMP)
    b = _backend.compiled.check_messages(ptr, prior, CLAMP)
    assert np.allclose(a, b, atol=1e-10)


def test_kernel_cap(backend):
    kern = _backend.get(backend)
    ptr = np.array([0, 4])
    with pytest.raises(EnumerationCapError):
        kern.p_messages(np.zeros(1), ptr, np.ones(4), np.zeros(4), 1.0, CLAMP, 2)


def test_backend_lookup():
    assert _backend.get("python").name == "python"
    with pytest.raises(ValueError):
        _backend.get("fortran")


def test_check_messages_edge_values(backend):
    kern = _backend.get(backend)
    ptr = np.array([0, 3, 6, 8, 10])
    v2c = np.array([0.0, 2.0, -1.0, CLAMP, -CLAMP, 0.5, 1e6, -1e6, 1e-12, 3.0])
    out = kern.check_messages(ptr, v2c, CLAMP)
    for c in range(4):
        edges = list(range(ptr[c], ptr[c + 1]))
        for t in edges:
            # the float tanh form saturates at +-50; compare against 50 digits
            mpmath.mp.dps = 50
            prod = mpmath.mpf(1)
            for e in edges:
                if e != t:
                    prod *= mpmath.tanh(mpmath.mpf(float(np.clip(v2c[e], -CLAMP, CLAMP))) / 2)
            expected = float(2 * mpmath.atanh(prod))
            assert out[t] == pytest.approx(expected, abs=1e-9)
    assert np.all(np.isfinite(out))


def test_pure_python_switch():
    import os
    import subprocess
    import sys

    code = "import impulse_mud.detectors as d; print(d.BACKEND)"
    env = dict(os.environ, IMPULSE_MUD_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
