"""Discrete-time TH-IR multiuser channel.

The matched-filter output for one symbol interval is modelled as
``r = S A b + n`` where ``S`` is the (Nc*Nf) x K slot matrix, ``A`` the
diagonal amplitude matrix and ``n`` white Gaussian noise. Row ``l`` of
``S`` is the global slot ``f * Nc + chip`` of frame ``f``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SystemParams:
    users: int
    chips_per_frame: int
    frames: int
    amplitudes: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        for name in ("users", "chips_per_frame", "frames"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        amps = self.amplitudes
        if amps is None:
            amps = np.ones(self.users)
        amps = np.array(amps, dtype=float).reshape(-1)
        if amps.size == 1 and self.users > 1:
            amps = np.full(self.users, amps[0])
        if amps.shape != (self.users,):
            raise ValueError(f"expected {self.users} amplitudes, got {amps.size}")
        if not np.all(amps > 0):
            raise ValueError("amplitudes must be strictly positive")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def slots(self) -> int:
        return self.chips_per_frame * self.frames


@dataclass(frozen=True)
class HoppingPattern:
    """Chip index ``chips[k, f]`` used by user ``k`` in frame ``f``."""

    chips: np.ndarray

    def __post_init__(self):
        chips = np.array(self.chips, dtype=np.int64)
        if chips.ndim != 2:
            raise ValueError("hopping pattern must be a K x Nf matrix")
        chips.setflags(write=False)
        object.__setattr__(self, "chips", chips)


@dataclass(frozen=True)
class SlotMatrix:
    entries: np.ndarray
    chips_per_frame: int

    @property
    def users(self) -> int:
        return self.entries.shape[1]

    @property
    def frames(self) -> int:
        return self.entries.shape[0] // self.chips_per_frame

    def user_rows(self, user: int) -> np.ndarray:
        """Global slot index of each of ``user``'s pulses, in frame order."""
        return np.flatnonzero(self.entries[:, user])

    @property
    def load(self) -> np.ndarray:
        """Number of users occupying each slot (row sums)."""
        return self.entries.sum(axis=1)


@dataclass(frozen=True)
class ReceivedSamples:
    samples: np.ndarray
    noise_std: float


def generate_hopping(params: SystemParams, rng: np.random.Generator) -> HoppingPattern:
    """Draw i.i.d. uniform chip positions for every user and frame."""
    chips = rng.integers(0, params.chips_per_frame, size=(params.users, params.frames))
    return HoppingPattern(chips)


def build_slot_matrix(pattern: HoppingPattern, params: SystemParams) -> SlotMatrix:
    chips = pattern.chips
    if chips.shape != (params.users, params.frames):
        raise ValueError(
            f"pattern has shape {chips.shape}, expected ({params.users}, {params.frames})"
        )
    nc = params.chips_per_frame
    if chips.size and (chips.min() < 0 or chips.max() >= nc):
        raise ValueError(f"chip indices must lie in [0, {nc - 1}]")
    rows = np.arange(params.frames) * nc + chips  # K x Nf
    entries = np.zeros((params.slots, params.users), dtype=np.int8)
    entries[rows, np.arange(params.users)[:, None]] = 1
    entries.setflags(write=False)
    return SlotMatrix(entries, nc)


def _symbol_matrix(symbols, users: int, frames: int) -> np.ndarray:
    x = np.asarray(symbols, dtype=float)
    if x.ndim == 1:
        if x.shape != (users,):
            raise ValueError(f"expected {users} symbols, got shape {x.shape}")
        x = np.repeat(x[:, None], frames, axis=1)
    elif x.shape != (users, frames):
        raise ValueError(f"expected symbol matrix ({users}, {frames}), got {x.shape}")
    return x


def transmit(slot: SlotMatrix, params: SystemParams, symbols) -> np.ndarray:
    """Noiseless matched-filter output ``S A b``.

    ``symbols`` is either one +/-1 symbol per user (repeated over all
    frames) or a K x Nf matrix carrying one channel symbol per frame.
    """
    if slot.entries.shape != (params.slots, params.users):
        raise ValueError("slot matrix does not match system parameters")
    x = _symbol_matrix(symbols, params.users, params.frames)
    users, rows = np.nonzero(slot.entries.T)  # user-major, frames ascending
    if rows.size != params.users * params.frames:
        raise ValueError("slot matrix must hold exactly one pulse per user and frame")
    out = np.zeros(params.slots)
    np.add.at(out, rows, (params.amplitudes[:, None] * x).ravel())
    return out


def add_awgn(clean, noise_std: float, rng: np.random.Generator) -> ReceivedSamples:
    if noise_std < 0:
        raise ValueError("noise_std must be non-negative")
    clean = np.asarray(clean, dtype=float)
    if noise_std == 0:
        return ReceivedSamples(clean.copy(), 0.0)
    return ReceivedSamples(clean + rng.normal(0.0, noise_std, size=clean.shape), float(noise_std))


def collision_vector(slot: SlotMatrix, user: int) -> np.ndarray:
    """Per-frame flags: 1 where another user shares ``user``'s slot."""
    if not 0 <= user < slot.users:
        raise IndexError(f"user {user} out of range for K={slot.users}")
    rows = slot.user_rows(user)
    return (slot.load[rows] >= 2).astype(np.int8)


def noise_std_from_ebn0(ebn0_db: float, amplitude: float, n: int, k: int) -> float:
    """Noise standard deviation for a given Eb/N0.

    Each information bit spends n/k pulses of energy ``amplitude**2``, and
    the per-sample noise variance is N0/2.
    """
    if not (n >= k >= 1):
        raise ValueError("need n >= k >= 1")
    if amplitude <= 0:
        raise ValueError("amplitude must be positive")
    eb = amplitude**2 * n / k
    n0 = eb / 10 ** (ebn0_db / 10)
    return math.sqrt(n0 / 2)
