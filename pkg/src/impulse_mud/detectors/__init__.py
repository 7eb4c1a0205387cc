"""Multiuser detectors: ID, FG3, CFG3, FP, blinking receiver and exhaustive MAP."""
from ._backend import active as _active
from .blinking import blinking_statistic, detect_blinking, detect_blinking_all
from .fp import detect_fp
from .graph import DetectionResult, DetectorGraph, build_graph
from .iterative import detect_cfg3, detect_fg3, detect_id
from .map_oracle import MAX_HYPOTHESIS_BITS, HypothesisCapError, detect_map_oracle
from .nodes import (
    CLAMP,
    MAX_COLLIDING,
    EnumerationCapError,
    b_variable_llr,
    e_node_llr,
    p_node_llr,
    pc_node_llr,
)

BACKEND = _active.name

__all__ = [
    "BACKEND",
    "CLAMP",
    "MAX_COLLIDING",
    "MAX_HYPOTHESIS_BITS",
    "DetectionResult",
    "DetectorGraph",
    "EnumerationCapError",
    "HypothesisCapError",
    "b_variable_llr",
    "blinking_statistic",
    "build_graph",
    "detect_blinking",
    "detect_blinking_all",
    "detect_cfg3",
    "detect_fg3",
    "detect_fp",
    "detect_id",
    "detect_map_oracle",
    "e_node_llr",
    "p_node_llr",
    "pc_node_llr",
]
