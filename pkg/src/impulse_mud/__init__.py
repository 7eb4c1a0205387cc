"""Multiuser detection for time-hopping impulse radio."""
from .channel import (
    HoppingPattern,
    ReceivedSamples,
    SlotMatrix,
    SystemParams,
    add_awgn,
    build_slot_matrix,
    collision_vector,
    generate_hopping,
    noise_std_from_ebn0,
    transmit,
)
from .codes import LinearCode, bundled_ldpc, load_alist, repetition_code

__version__ = "0.1.0"

__all__ = [
    "HoppingPattern",
    "LinearCode",
    "ReceivedSamples",
    "SlotMatrix",
    "SystemParams",
    "__version__",
    "add_awgn",
    "build_slot_matrix",
    "bundled_ldpc",
    "collision_vector",
    "generate_hopping",
    "load_alist",
    "noise_std_from_ebn0",
    "repetition_code",
    "transmit",
]
