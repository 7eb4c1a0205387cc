"""Bipartite system graph shared by the iterative detectors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..channel import SlotMatrix, SystemParams
from ..codes import LinearCode, encoder_for


@dataclass
class DetectionResult:
    """Hard bit decisions (bit 0 <-> symbol +1) and, for soft detectors, LLRs.

    ``decisions``/``llrs`` are K x k over information bits. Coded
    detectors also fill ``coded_llrs``/``codewords`` (K x n).
    """

    decisions: np.ndarray
    llrs: np.ndarray | None = None
    iterations_run: int = 0
    coded_llrs: np.ndarray | None = None
    codewords: np.ndarray | None = None
    erasures: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class DetectorGraph:
    """Input (slot) nodes on the left, per-user constraint nodes on the right.

    Edges are stored flat and grouped by input node: the edges of input
    node ``i`` are ``node_ptr[i]:node_ptr[i+1]``. ``user_edges[k, f]`` is
    the edge carrying user ``k``'s frame-``f`` pulse.

    With ``code`` set, each user owns ``n`` b-variable nodes tied by the
    parity checks of ``code.h``; ``chk_ptr``/``chk_var`` describe those
    checks for all users at once, variable ``k * n + j`` being bit ``j`` of
    user ``k``. Without a code the user side is a single equality node.
    """

    params: SystemParams
    node_rows: np.ndarray
    node_ptr: np.ndarray
    edge_node: np.ndarray
    edge_user: np.ndarray
    edge_frame: np.ndarray
    edge_amp: np.ndarray
    user_edges: np.ndarray
    code: LinearCode | None = None
    chk_ptr: np.ndarray | None = None
    chk_var: np.ndarray | None = None
    info_positions: np.ndarray | None = None

    @property
    def n_edges(self) -> int:
        return self.edge_user.size

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.node_ptr)

    def samples_at_nodes(self, samples) -> np.ndarray:
        return np.ascontiguousarray(np.asarray(samples, dtype=float)[self.node_rows])

    def is_tree(self) -> bool:
        """True when the whole factor graph has no cycles."""
        k, nf = self.user_edges.shape
        n_in = self.node_rows.size
        parent = list(range(n_in + k * nf + (0 if self.code is None else k * self.code.h.shape[0]) + k))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra == rb:
                return False
            parent[ra] = rb
            return True

        var0 = n_in  # b-variable (k, f) lives at var0 + k * nf + f
        for e in range(self.n_edges):
            if not union(int(self.edge_node[e]), var0 + int(self.edge_user[e]) * nf + int(self.edge_frame[e])):
                return False
        if self.code is None:
            e0 = var0 + k * nf
            for u in range(k):
                for f in range(nf):
                    if not union(e0 + u, var0 + u * nf + f):
                        return False
            return True
        c0 = var0 + k * nf
        for c in range(self.chk_ptr.size - 1):
            for v in self.chk_var[self.chk_ptr[c]:self.chk_ptr[c + 1]]:
                if not union(c0 + c, var0 + int(v)):
                    return False
        return True


def build_graph(slot: SlotMatrix, params: SystemParams, code: LinearCode | None = None) -> DetectorGraph:
    entries = slot.entries
    if entries.shape != (params.slots, params.users):
        raise ValueError("slot matrix does not match system parameters")
    if code is not None and code.n != params.frames:
        raise ValueError(f"code length {code.n} differs from frame count {params.frames}")
    rows, users = np.nonzero(entries)  # row-major: grouped by slot, users ascending
    rows = rows.astype(np.int64)
    users = users.astype(np.int64)
    node_rows, edge_node = np.unique(rows, return_inverse=True)
    node_ptr = np.zeros(node_rows.size + 1, dtype=np.int64)
    np.cumsum(np.bincount(edge_node, minlength=node_rows.size), out=node_ptr[1:])
    frames = rows // slot.chips_per_frame
    user_edges = np.empty((params.users, params.frames), dtype=np.int64)
    user_edges[users, frames] = np.arange(rows.size)
    chk_ptr = chk_var = info = None
    if code is not None:
        h = code.h
        m, n = h.shape
        c_rows, c_cols = np.nonzero(h)
        per_check = np.bincount(c_rows, minlength=m)
        offsets = np.arange(params.users)[:, None] * n
        chk_var = (offsets + c_cols[None, :]).ravel().astype(np.int64)
        chk_ptr = np.zeros(params.users * m + 1, dtype=np.int64)
        np.cumsum(np.tile(per_check, params.users), out=chk_ptr[1:])
        info = encoder_for(code).info_positions
    return DetectorGraph(
        params=params,
        node_rows=node_rows.astype(np.int64),
        node_ptr=node_ptr,
        edge_node=edge_node.astype(np.int64),
        edge_user=users,
        edge_frame=frames.astype(np.int64),
        edge_amp=np.ascontiguousarray(params.amplitudes[users]),
        user_edges=user_edges,
        code=code,
        chk_ptr=chk_ptr,
        chk_var=chk_var,
        info_positions=info,
    )
