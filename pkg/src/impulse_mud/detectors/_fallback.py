"""Pure NumPy message kernels, used when the compiled extension is absent.

Both functions operate on flat edge arrays laid out in CSR form and must
agree with ``_kernels.pyx`` to rounding error.
"""
from __future__ import annotations

import itertools

import numpy as np
from scipy.special import logsumexp

from .nodes import EnumerationCapError

_PATTERNS: dict[int, np.ndarray] = {}


def _patterns(j: int) -> np.ndarray:
    if j not in _PATTERNS:
        _PATTERNS[j] = np.array(list(itertools.product((1.0, -1.0), repeat=j))).reshape(-1, j)
    return _PATTERNS[j]


def p_messages(y, node_ptr, amp, prior, noise_var, clamp, cap):
    """Slot-to-pulse LLRs for every edge.

    ``y[i]`` is the sample of input node ``i`` whose edges are
    ``node_ptr[i]:node_ptr[i+1]``; ``prior`` holds the incoming LLR of each
    edge.
    """
    node_ptr = np.asarray(node_ptr, dtype=np.int64)
    amp = np.asarray(amp, dtype=float)
    prior = np.clip(np.asarray(prior, dtype=float), -clamp, clamp)
    out = np.empty_like(amp)
    degree = np.diff(node_ptr)
    if degree.size and degree.max() - 1 > cap:
        raise EnumerationCapError(f"{degree.max() - 1} interfering pulses exceed the cap of {cap}")
    two_var = 2.0 * noise_var
    for d in np.unique(degree):
        nodes = np.flatnonzero(degree == d)
        edges = node_ptr[nodes, None] + np.arange(d)  # M x d
        yv = np.asarray(y, dtype=float)[nodes][:, None]
        a = amp[edges]
        if d == 1:
            out[edges[:, 0]] = 2.0 * a[:, 0] * yv[:, 0] / noise_var
            continue
        pat = _patterns(d - 1)  # P x (d-1)
        weight = (pat.T + 1.0) / 2.0
        l = prior[edges]
        for t in range(d):
            keep = np.arange(d) != t
            base = a[:, keep] @ pat.T  # M x P
            log_w = l[:, keep] @ weight
            at = a[:, t : t + 1]
            num = logsumexp(-((yv - at - base) ** 2) / two_var + log_w, axis=1)
            den = logsumexp(-((yv + at - base) ** 2) / two_var + log_w, axis=1)
            out[edges[:, t]] = num - den
    return np.clip(out, -clamp, clamp)


def _boxplus(a, b):
    """Exact log-domain parity combination of two LLR arrays."""
    return (
        np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
        + np.log1p(np.exp(-np.abs(a + b)))
        - np.log1p(np.exp(-np.abs(a - b)))
    )


def check_messages(chk_ptr, v2c, clamp):
    """Extrinsic parity-check outputs for every check edge."""
    chk_ptr = np.asarray(chk_ptr, dtype=np.int64)
    v2c = np.clip(np.asarray(v2c, dtype=float), -clamp, clamp)
    out = np.empty_like(v2c)
    degree = np.diff(chk_ptr)
    for d in np.unique(degree):
        checks = np.flatnonzero(degree == d)
        edges = chk_ptr[checks, None] + np.arange(d)
        if d == 1:
            # a degree-1 check pins its bit to zero
            out[edges[:, 0]] = clamp
            continue
        m = v2c[edges]
        fwd = np.empty_like(m)
        bwd = np.empty_like(m)
        fwd[:, 0] = m[:, 0]
        for i in range(1, d):
            fwd[:, i] = _boxplus(fwd[:, i - 1], m[:, i])
        bwd[:, d - 1] = m[:, d - 1]
        for i in range(d - 2, -1, -1):
            bwd[:, i] = _boxplus(bwd[:, i + 1], m[:, i])
        res = np.empty_like(m)
        res[:, 0] = bwd[:, 1]
        res[:, d - 1] = fwd[:, d - 2]
        for i in range(1, d - 1):
            res[:, i] = _boxplus(fwd[:, i - 1], bwd[:, i + 1])
        out[edges] = res
    return np.clip(out, -clamp, clamp)
