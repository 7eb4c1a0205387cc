"""Iterative multiuser detectors on the slot/user graph.

All three use a flooding schedule: every input node fires, then every
user-side node fires; one such sweep is one iteration.
"""
from __future__ import annotations

import numpy as np

from . import _backend
from .graph import DetectionResult, DetectorGraph
from .nodes import CLAMP, MAX_COLLIDING, hard_decision, sgn

# noiseless runs are treated as vanishing noise relative to the weakest pulse
_MIN_STD_RATIO = 1e-6


def _noise_var(graph: DetectorGraph, noise_std: float) -> float:
    if noise_std < 0:
        raise ValueError("noise_std must be non-negative")
    floor = _MIN_STD_RATIO * float(graph.params.amplitudes.min())
    return max(noise_std, floor) ** 2


def _samples(samples):
    if hasattr(samples, "samples"):
        return samples.samples, samples.noise_std
    raise TypeError("expected ReceivedSamples")


def detect_id(graph: DetectorGraph, samples, iterations: int = 8) -> DetectionResult:
    """Hard-message interference cancellation.

    Input nodes subtract the other pulses in their slot using the users'
    current hard estimates; user nodes send back the sign of the sum of
    their other residuals.
    """
    r, _ = _samples(samples)
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    y = graph.samples_at_nodes(r)
    amp = graph.edge_amp
    ue = graph.user_edges
    hard = np.zeros(graph.n_edges)  # user -> input, initially 0
    for _ in range(iterations):
        contrib = amp * hard
        slot_total = np.bincount(graph.edge_node, weights=contrib, minlength=y.size)
        residual = y[graph.edge_node] - slot_total[graph.edge_node] + contrib
        per_user = residual[ue]
        total = per_user.sum(axis=1)
        hard[ue] = sgn(total[:, None] - per_user)
    decisions = hard_decision(sgn(total))[:, None]
    return DetectionResult(decisions=decisions, iterations_run=iterations)


def detect_fg3(
    graph: DetectorGraph,
    samples,
    iterations: int = 8,
    *,
    backend=None,
    cap: int = MAX_COLLIDING,
    trace: list | None = None,
) -> DetectionResult:
    """Sum-product on the slot / equality-node graph (repetition transmission).

    If ``trace`` is a list, each iteration appends the pair
    ``(input->user, user->input)`` of K x Nf message arrays.
    """
    r, noise_std = _samples(samples)
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    kern = _backend.get(backend)
    y = graph.samples_at_nodes(r)
    var = _noise_var(graph, noise_std)
    ue = graph.user_edges
    to_input = np.zeros(graph.n_edges)
    for _ in range(iterations):
        to_user = kern.p_messages(y, graph.node_ptr, graph.edge_amp, to_input, var, CLAMP, cap)
        per_user = to_user[ue]
        total = per_user.sum(axis=1)
        to_input = np.empty(graph.n_edges)
        to_input[ue] = np.clip(total[:, None] - per_user, -CLAMP, CLAMP)
        if trace is not None:
            trace.append((per_user, to_input[ue]))
    llrs = total[:, None]
    return DetectionResult(decisions=hard_decision(llrs), llrs=llrs, iterations_run=iterations)


def detect_cfg3(
    graph: DetectorGraph,
    samples,
    code=None,
    iterations: int = 8,
    *,
    backend=None,
    cap: int = MAX_COLLIDING,
) -> DetectionResult:
    """Sum-product with each user's bits tied by the parity checks of a code.

    Per iteration: input nodes fire, b variables send to the checks,
    checks fire, b variables send back to the input nodes.
    """
    r, noise_std = _samples(samples)
    if graph.code is None:
        raise ValueError("graph was built without a code")
    if code is not None and code != graph.code:
        raise ValueError("code does not match the graph")
    code = graph.code
    if code.n != graph.params.frames:
        raise ValueError("code length must equal the number of frames")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    kern = _backend.get(backend)
    y = graph.samples_at_nodes(r)
    var = _noise_var(graph, noise_std)
    ue = graph.user_edges
    users, n = ue.shape
    n_var = users * n
    chk_var = graph.chk_var
    flat_edges = ue.ravel()  # variable k * n + j <-> edge ue[k, j]
    to_input = np.zeros(graph.n_edges)
    c2v = np.zeros(chk_var.size)
    c2v_sum = np.zeros(n_var)
    for _ in range(iterations):
        to_user = kern.p_messages(y, graph.node_ptr, graph.edge_amp, to_input, var, CLAMP, cap)
        channel = to_user[flat_edges]
        v2c = channel[chk_var] + c2v_sum[chk_var] - c2v
        c2v = kern.check_messages(graph.chk_ptr, v2c, CLAMP)
        c2v_sum = np.bincount(chk_var, weights=c2v, minlength=n_var)
        to_input = np.empty(graph.n_edges)
        to_input[flat_edges] = np.clip(c2v_sum, -CLAMP, CLAMP)
    coded = (channel + c2v_sum).reshape(users, n)
    info = coded[:, graph.info_positions]
    return DetectionResult(
        decisions=hard_decision(info),
        llrs=info,
        iterations_run=iterations,
        coded_llrs=coded,
        codewords=hard_decision(coded),
    )
