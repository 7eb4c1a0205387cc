import math

import numpy as np
import pytest

from impulse_mud import (
    HoppingPattern,
    SystemParams,
    add_awgn,
    build_slot_matrix,
    collision_vector,
    generate_hopping,
    noise_std_from_ebn0,
    transmit,
)

TOY = SystemParams(2, 5, 3)
TOY_PATTERN = HoppingPattern(np.array([[1, 0, 3], [2, 0, 0]]))


def test_params_validation():
    with pytest.raises(ValueError):
        SystemParams(0, 5, 3)
    with pytest.raises(ValueError):
        SystemParams(2, 5, 3, [1.0, -1.0])
    with pytest.raises(ValueError):
        SystemParams(2, 5, 3, [1.0, 1.0, 1.0])
    assert np.array_equal(SystemParams(3, 5, 3, 2.0).amplitudes, [2.0, 2.0, 2.0])
    assert TOY.slots == 15


def test_single_chip_pattern_is_zero(rng):
    pattern = generate_hopping(SystemParams(4, 1, 5), rng)
    assert pattern.chips.shape == (4, 5)
    assert not pattern.chips.any()


def test_hopping_deterministic():
    p = SystemParams(5, 20, 3)
    a = generate_hopping(p, np.random.default_rng(7))
    b = generate_hopping(p, np.random.default_rng(7))
    assert np.array_equal(a.chips, b.chips)


def test_hopping_uniform():
    p = SystemParams(1, 20, 100_000)
    chips = generate_hopping(p, np.random.default_rng(3)).chips.ravel()
    counts = np.bincount(chips, minlength=20)
    expected = chips.size / 20
    sigma = math.sqrt(chips.size * (1 / 20) * (19 / 20))
    assert np.all(np.abs(counts - expected) < 5 * sigma)


def test_toy_slot_matrix():
    s = build_slot_matrix(TOY_PATTERN, TOY)
    expected_t = np.array([
        [0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0],
    ])
    assert np.array_equal(s.entries.T, expected_t)
    assert s.users == 2 and s.frames == 3


def test_trivial_slot_matrix():
    p = SystemParams(1, 1, 1)
    s = build_slot_matrix(HoppingPattern(np.zeros((1, 1))), p)
    assert np.array_equal(s.entries, [[1]])


def test_slot_matrix_columns(rng):
    p = SystemParams(7, 6, 4)
    s = build_slot_matrix(generate_hopping(p, rng), p)
    assert np.all(s.entries.sum(axis=0) == 4)
    for f in range(4):
        assert np.all(s.entries[f * 6:(f + 1) * 6].sum(axis=0) == 1)


def test_slot_matrix_rejects_bad_pattern():
    with pytest.raises(ValueError):
        build_slot_matrix(HoppingPattern(np.array([[5, 0, 0], [0, 0, 0]])), TOY)
    with pytest.raises(ValueError):
        build_slot_matrix(HoppingPattern(np.zeros((3, 3))), TOY)


def test_transmit_single_user():
    p = SystemParams(1, 5, 3)
    s = build_slot_matrix(HoppingPattern(np.array([[1, 0, 3]])), p)
    r = transmit(s, p, [1.0])
    expected = np.zeros(15)
    expected[[1, 5, 13]] = 1.0
    assert np.array_equal(r, expected)


def test_transmit_cancellation():
    r = transmit(build_slot_matrix(TOY_PATTERN, TOY), TOY, [1.0, -1.0])
    assert r[5] == 0.0
    assert r[1] == 1.0 and r[2] == -1.0


def test_transmit_matches_dense(rng):
    p = SystemParams(6, 7, 3, rng.uniform(0.5, 2.0, 6))
    s = build_slot_matrix(generate_hopping(p, rng), p)
    b = rng.choice([-1.0, 1.0], 6)
    assert np.allclose(transmit(s, p, b), s.entries @ np.diag(p.amplitudes) @ b)
    per_frame = rng.choice([-1.0, 1.0], (6, 3))
    frame_of_row = np.arange(21) // 7
    dense = (s.entries * p.amplitudes * per_frame.T[frame_of_row]).sum(axis=1)
    assert np.allclose(transmit(s, p, per_frame), dense)


def test_awgn(rng):
    clean = np.arange(5.0)
    assert np.array_equal(add_awgn(clean, 0.0, rng).samples, clean)
    big = add_awgn(np.zeros(10**6), 1.0, rng).samples
    assert 0.99 <= big.var() <= 1.01
    a = add_awgn(clean, 0.3, np.random.default_rng(1)).samples
    b = add_awgn(clean, 0.3, np.random.default_rng(1)).samples
    assert np.array_equal(a, b)
    with pytest.raises(ValueError):
        add_awgn(clean, -1.0, rng)


def test_collision_vector():
    s = build_slot_matrix(TOY_PATTERN, TOY)
    assert collision_vector(s, 0).tolist() == [0, 1, 0]
    assert collision_vector(s, 1).tolist() == [0, 1, 0]
    p = SystemParams(1, 5, 3)
    assert not collision_vector(build_slot_matrix(HoppingPattern([[1, 2, 3]]), p), 0).any()
    same = SystemParams(3, 5, 3)
    s = build_slot_matrix(HoppingPattern(np.tile([2, 4, 0], (3, 1))), same)
    assert collision_vector(s, 2).tolist() == [1, 1, 1]
    with pytest.raises(IndexError):
        collision_vector(s, 3)


def test_noise_std():
    assert noise_std_from_ebn0(0.0, 1.0, 1, 1) == pytest.approx(1 / math.sqrt(2))
    assert noise_std_from_ebn0(0.0, 1.0, 3, 1) == pytest.approx(math.sqrt(1.5))
    with pytest.raises(ValueError):
        noise_std_from_ebn0(0.0, 1.0, 1, 2)
