"""Binary linear block codes: parity-check matrices, encoders and alist I/O."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class AlistError(ValueError):
    """Malformed alist text. ``line`` is 1-based (0 when unknown)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def gf2_rref(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) and the pivot column of each row.

    Zero rows are dropped from the result.
    """
    a = np.array(mat, dtype=np.uint8) & 1
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(a[r:, c])
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        a[others] ^= a[r]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def gf2_rank(mat: np.ndarray) -> int:
    return len(gf2_rref(mat)[1])


def _independent_rows(h: np.ndarray) -> np.ndarray:
    """Indices of a maximal set of linearly independent rows, in order."""
    basis: dict[int, np.ndarray] = {}  # leading column -> reduced row
    keep = []
    for i, row in enumerate(h):
        v = row.copy()
        while v.any():
            lead = int(np.argmax(v))
            if lead not in basis:
                basis[lead] = v
                keep.append(i)
                break
            v ^= basis[lead]
    return np.array(keep, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class LinearCode:
    """Binary linear code given by a full-rank parity-check matrix.

    Dependent rows of the supplied matrix are dropped, so ``k`` may come
    out larger than ``n - h.shape[0]`` of the input.
    """

    h: np.ndarray
    n: int
    k: int
    name: str = ""

    @classmethod
    def from_parity_check(cls, h, name: str = "") -> "LinearCode":
        h = np.array(h, dtype=np.uint8)
        if h.ndim != 2:
            raise ValueError("parity-check matrix must be 2-D")
        if np.any(h > 1):
            raise ValueError("parity-check matrix must be binary")
        n = h.shape[1]
        if n < 1:
            raise ValueError("code length must be positive")
        h = h[_independent_rows(h)] if h.shape[0] else h
        h.setflags(write=False)
        k = n - h.shape[0]
        if k < 1:
            raise ValueError("parity-check matrix leaves no information bits")
        return cls(h, n, k, name)

    @property
    def rate(self) -> float:
        return self.k / self.n

    def __eq__(self, other):
        if not isinstance(other, LinearCode):
            return NotImplemented
        return self.n == other.n and self.k == other.k and np.array_equal(self.h, other.h)

    __hash__ = object.__hash__


def repetition_code(nf: int) -> LinearCode:
    """Length-``nf`` repetition code with checks ``b_i + b_{nf-1} = 0``."""
    if nf < 2:
        raise ValueError("repetition code needs nf >= 2")
    h = np.zeros((nf - 1, nf), dtype=np.uint8)
    h[np.arange(nf - 1), np.arange(nf - 1)] = 1
    h[:, nf - 1] = 1
    return LinearCode.from_parity_check(h, name=f"rep{nf}")


def is_codeword(code: LinearCode, bits) -> bool:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape != (code.n,):
        raise ValueError(f"expected {code.n} bits, got shape {bits.shape}")
    return not np.any((code.h.astype(np.int64) @ bits) & 1)


@dataclass(frozen=True)
class Encoder:
    """Systematic encoder.

    ``generator`` is k x n in code coordinates. ``column_permutation``
    lists the code positions so that ``generator[:, perm]`` is
    ``[I_k | P]``; the first k entries are the information positions.
    """

    generator: np.ndarray
    column_permutation: np.ndarray

    @property
    def k(self) -> int:
        return self.generator.shape[0]

    @property
    def info_positions(self) -> np.ndarray:
        return self.column_permutation[: self.k]


def systematic_generator(code: LinearCode) -> Encoder:
    reduced, pivots = gf2_rref(code.h)
    n = code.n
    free = [c for c in range(n) if c not in set(pivots)]
    k = len(free)
    if k != code.k:
        # LinearCode guarantees full row rank; guard against hand-built instances
        raise ValueError(f"parity-check rank mismatch: expected k={code.k}, found {k}")
    g = np.zeros((k, n), dtype=np.uint8)
    g[np.arange(k), free] = 1
    if pivots:
        # parity bit at pivot column of row r equals sum of that row's free entries
        g[:, pivots] = reduced[:, free].T
    perm = np.array(free + list(pivots), dtype=np.int64)
    g.setflags(write=False)
    perm.setflags(write=False)
    return Encoder(g, perm)


@lru_cache(maxsize=32)
def encoder_for(code: LinearCode) -> Encoder:
    """Cached :func:`systematic_generator` (codes hash by identity)."""
    return systematic_generator(code)


def encode(enc: Encoder, info_bits) -> np.ndarray:
    info = np.asarray(info_bits, dtype=np.int64)
    if info.shape[-1] != enc.k:
        raise ValueError(f"expected {enc.k} information bits, got {info.shape[-1]}")
    return ((info @ enc.generator.astype(np.int64)) & 1).astype(np.uint8)


def emit_alist(code: LinearCode) -> str:
    h = code.h
    m, n = h.shape
    col_lists = [np.flatnonzero(h[:, j]) + 1 for j in range(n)]
    row_lists = [np.flatnonzero(h[i]) + 1 for i in range(m)]
    max_col = max((len(c) for c in col_lists), default=0)
    max_row = max((len(r) for r in row_lists), default=0)

    def padded(idx, width):
        return " ".join(str(int(v)) for v in list(idx) + [0] * (width - len(idx)))

    lines = [f"{n} {m}", f"{max_col} {max_row}"]
    lines.append(" ".join(str(len(c)) for c in col_lists))
    lines.append(" ".join(str(len(r)) for r in row_lists))
    lines += [padded(c, max_col) for c in col_lists]
    lines += [padded(r, max_row) for r in row_lists]
    return "\n".join(lines) + "\n"


def load_alist(text: str, name: str = "") -> LinearCode:
    """Parse the alist sparse-matrix format."""
    numbered = [
        (i + 1, line.split()) for i, line in enumerate(text.splitlines()) if line.strip()
    ]
    cursor = 0

    def next_ints(section: str) -> tuple[int, list[int]]:
        nonlocal cursor
        if cursor >= len(numbered):
            last = numbered[-1][0] if numbered else 0
            raise AlistError(f"unexpected end of file, missing {section}", last + 1)
        lineno, tokens = numbered[cursor]
        cursor += 1
        try:
            return lineno, [int(t) for t in tokens]
        except ValueError:
            raise AlistError(f"non-integer token in {section}", lineno) from None

    lineno, header = next_ints("header (n m)")
    if len(header) != 2 or min(header) < 1:
        raise AlistError("header must hold two positive integers n m", lineno)
    n, m = header
    lineno, maxdeg = next_ints("maximum degrees")
    if len(maxdeg) != 2:
        raise AlistError("expected maximum column and row degrees", lineno)
    lineno, col_deg = next_ints("column degrees")
    if len(col_deg) != n:
        raise AlistError(f"expected {n} column degrees, got {len(col_deg)}", lineno)
    lineno, row_deg = next_ints("row degrees")
    if len(row_deg) != m:
        raise AlistError(f"expected {m} row degrees, got {len(row_deg)}", lineno)
    if max(col_deg) > maxdeg[0] or max(row_deg) > maxdeg[1]:
        raise AlistError("degree exceeds declared maximum", lineno)

    from_cols = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        lineno, idx = next_ints(f"column list {j + 1}")
        _check_list(idx, col_deg[j], m, lineno, "column")
        from_cols[np.array(idx[: col_deg[j]], dtype=np.int64) - 1, j] = 1
    from_rows = np.zeros((m, n), dtype=np.uint8)
    for i in range(m):
        lineno, idx = next_ints(f"row list {i + 1}")
        _check_list(idx, row_deg[i], n, lineno, "row")
        from_rows[i, np.array(idx[: row_deg[i]], dtype=np.int64) - 1] = 1
    if not np.array_equal(from_cols, from_rows):
        bad = np.argwhere(from_cols != from_rows)[0]
        raise AlistError(
            f"column and row lists disagree at entry ({bad[0] + 1}, {bad[1] + 1})", lineno
        )
    return LinearCode.from_parity_check(from_cols, name=name)


def _check_list(idx: list[int], degree: int, bound: int, lineno: int, kind: str) -> None:
    entries, padding = idx[:degree], idx[degree:]
    if len(entries) < degree:
        raise AlistError(f"{kind} list shorter than its degree {degree}", lineno)
    if any(p != 0 for p in padding):
        raise AlistError(f"{kind} list longer than its degree {degree}", lineno)
    if any(v < 1 or v > bound for v in entries):
        raise AlistError(f"{kind} index out of range 1..{bound}", lineno)
    if len(set(entries)) != len(entries):
        raise AlistError(f"duplicate index in {kind} list", lineno)


def bundled_ldpc() -> LinearCode:
    """The (n=120, k=56) column-weight-3 LDPC code shipped with the package."""
    from importlib.resources import files

    text = files("impulse_mud").joinpath("data/ldpc_120_64_3.alist").read_text()
    return load_alist(text, name="ldpc120x56")
