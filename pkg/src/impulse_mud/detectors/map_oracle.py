"""Exhaustive MAP detection, the optimality reference for small systems."""
from __future__ import annotations

import itertools

import numpy as np

from ..channel import SlotMatrix, SystemParams
from ..codes import LinearCode, encode, encoder_for
from .graph import DetectionResult

MAX_HYPOTHESIS_BITS = 20
_CHUNK = 1 << 14


class HypothesisCapError(ValueError):
    pass


def _components(slot: SlotMatrix) -> list[list[int]]:
    """Groups of users linked through shared slots."""
    k = slot.users
    parent = list(range(k))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for row in slot.entries[slot.load >= 2]:
        us = np.flatnonzero(row)
        for u in us[1:]:
            parent[find(int(u))] = find(int(us[0]))
    groups: dict[int, list[int]] = {}
    for u in range(k):
        groups.setdefault(find(u), []).append(u)
    return list(groups.values())


def detect_map_oracle(
    samples,
    slot: SlotMatrix,
    params: SystemParams,
    code: LinearCode | None = None,
    noise_std: float | None = None,
) -> DetectionResult:
    """Exact per-bit posteriors by enumerating every user's information word.

    ``code=None`` means one bit per user repeated over all frames. The
    likelihood factorises over groups of users that never share a slot, so
    each group is enumerated separately; the result is the same as one
    joint enumeration.
    """
    r = np.asarray(samples.samples, dtype=float)
    sigma = samples.noise_std if noise_std is None else noise_std
    if sigma <= 0:
        raise ValueError("the MAP oracle needs a positive noise level")
    n = params.frames
    if code is None:
        k_bits = 1
        words = np.ones((2, n), dtype=np.uint8)
        words[0] = 0
        info_table = np.array([[0], [1]], dtype=np.uint8)
        info_pos = np.array([0])
    else:
        if code.n != n:
            raise ValueError("code length must equal the number of frames")
        k_bits = code.k
        enc = encoder_for(code)
        info_table = np.array(list(itertools.product((0, 1), repeat=k_bits)), dtype=np.uint8)
        words = encode(enc, info_table)
        info_pos = enc.info_positions
    if params.users * k_bits > MAX_HYPOTHESIS_BITS:
        raise HypothesisCapError(
            f"2^{params.users * k_bits} hypotheses exceed the cap of 2^{MAX_HYPOTHESIS_BITS}"
        )
    symbols = 1.0 - 2.0 * words  # codeword index -> +/-1 per frame
    rows_of = np.stack([slot.user_rows(u) for u in range(params.users)])  # K x n
    coded_llrs = np.zeros((params.users, n))
    n_words = words.shape[0]
    bit_is_one = words.astype(bool)  # n_words x n
    for group in _components(slot):
        u = len(group)
        rows = np.unique(rows_of[group])
        y = r[rows]
        # contribution of user g sending codeword w, stacked as (g * n_words + w) x rows
        contrib = np.zeros((u * n_words, rows.size))
        for g, user in enumerate(group):
            cols = np.searchsorted(rows, rows_of[user])
            contrib[g * n_words:(g + 1) * n_words, cols] = params.amplitudes[user] * symbols
        total = n_words**u
        log_mass = np.full((u, n_words), -np.inf)
        for start in range(0, total, _CHUNK):
            idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
            digits = np.empty((idx.size, u), dtype=np.int64)
            rest = idx
            for g in range(u):
                digits[:, g] = rest % n_words
                rest = rest // n_words
            onehot = np.zeros((idx.size, u * n_words))
            onehot[np.arange(idx.size)[:, None], digits + np.arange(u) * n_words] = 1.0
            resid = y - onehot @ contrib
            loglik = -np.einsum("ij,ij->i", resid, resid) / (2 * sigma**2)
            peak = loglik.max()
            weight = np.exp(loglik - peak)
            with np.errstate(divide="ignore"):
                for g in range(u):
                    chunk = np.log(np.bincount(digits[:, g], weights=weight, minlength=n_words)) + peak
                    log_mass[g] = np.logaddexp(log_mass[g], chunk)
        for g, user in enumerate(group):
            lm = log_mass[g][:, None]
            plus = np.logaddexp.reduce(np.where(bit_is_one, -np.inf, lm), axis=0)
            minus = np.logaddexp.reduce(np.where(bit_is_one, lm, -np.inf), axis=0)
            coded_llrs[user] = plus - minus
    info_llrs = np.zeros((params.users, k_bits))
    if code is None:
        # every frame carries the same bit, so any frame gives the posterior
        info_llrs[:, 0] = coded_llrs[:, 0]
    else:
        info_llrs = coded_llrs[:, info_pos]
    return DetectionResult(
        decisions=(info_llrs < 0).astype(np.uint8),
        llrs=info_llrs,
        iterations_run=0,
        coded_llrs=coded_llrs,
        codewords=(coded_llrs < 0).astype(np.uint8),
    )
