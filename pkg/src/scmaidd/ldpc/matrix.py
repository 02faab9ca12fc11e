"""Sparse parity-check matrices and the alist exchange format."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np


class AlistError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    """H with n_checks rows and n_bits columns, held as adjacency lists.

    ``var_neighbors[i]`` are the checks touching bit i (the set written
    di), ``check_neighbors[m]`` the bits in check m. Both are ascending and
    0-based.
    """
    n_bits: int
    n_checks: int
    var_neighbors: tuple[tuple[int, ...], ...]
    check_neighbors: tuple[tuple[int, ...], ...]

    @classmethod
    def from_dense(cls, H) -> "ParityCheckMatrix":
        H = np.asarray(H) % 2
        m, n = H.shape
        var = tuple(tuple(int(r) for r in np.flatnonzero(H[:, i])) for i in range(n))
        chk = tuple(tuple(int(c) for c in np.flatnonzero(H[r])) for r in range(m))
        return cls(n, m, var, chk)

    @classmethod
    def from_check_lists(cls, n_bits: int, check_neighbors) -> "ParityCheckMatrix":
        chk = tuple(tuple(sorted(int(i) for i in row)) for row in check_neighbors)
        var = [[] for _ in range(n_bits)]
        for r, row in enumerate(chk):
            for i in row:
                var[i].append(r)
        return cls(n_bits, len(chk), tuple(tuple(v) for v in var), chk)

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.n_checks, self.n_bits), dtype=np.uint8)
        H[self.edge_check, self.edge_var] = 1
        return H

    @cached_property
    def edge_var(self) -> np.ndarray:
        """Bit index of every edge; edges are ordered check by check."""
        return np.fromiter((i for row in self.check_neighbors for i in row), dtype=np.int64)

    @cached_property
    def edge_check(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_checks), [len(r) for r in self.check_neighbors])

    @property
    def n_edges(self) -> int:
        return int(self.edge_var.size)

    @cached_property
    def check_table(self) -> np.ndarray:
        """(n_checks, max row weight) edge ids, padded with n_edges."""
        return _padded(self.edge_check, self.n_checks, self.n_edges)

    @cached_property
    def var_table(self) -> np.ndarray:
        """(n_bits, max column weight) edge ids, padded with n_edges."""
        return _padded(self.edge_var, self.n_bits, self.n_edges)

    @property
    def column_weights(self) -> np.ndarray:
        return np.array([len(v) for v in self.var_neighbors])

    @property
    def row_weights(self) -> np.ndarray:
        return np.array([len(c) for c in self.check_neighbors])

    @property
    def is_regular(self) -> bool:
        cw, rw = self.column_weights, self.row_weights
        return bool((cw == cw[0]).all() and (rw == rw[0]).all())

    @property
    def P(self) -> int:
        """Variable-node degree of a regular code."""
        if not self.is_regular:
            raise ValueError("irregular code has no single variable degree")
        return int(self.column_weights[0])

    @property
    def design_rate(self) -> float:
        return 1.0 - self.n_checks / self.n_bits

    def syndrome(self, bits: np.ndarray) -> np.ndarray:
        """H c mod 2 along the last axis."""
        b = np.asarray(bits, dtype=np.int64)
        per_edge = b[..., self.edge_var]
        return (np.add.reduceat(per_edge, self._row_starts, axis=-1) % 2).astype(np.uint8)

    @cached_property
    def _row_starts(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.row_weights)[:-1]])

    def digest(self) -> str:
        h = hashlib.sha256(f"{self.n_bits} {self.n_checks}\n".encode())
        for row in self.check_neighbors:
            h.update((" ".join(map(str, row)) + "\n").encode())
        return h.hexdigest()

    def permute_columns(self, order) -> "ParityCheckMatrix":
        """New matrix whose column ``t`` is old column ``order[t]``."""
        order = np.asarray(order)
        pos = np.empty_like(order)
        pos[order] = np.arange(order.size)
        return ParityCheckMatrix.from_check_lists(
            self.n_bits, [[int(pos[i]) for i in row] for row in self.check_neighbors])


def _padded(owner: np.ndarray, n_rows: int, pad: int) -> np.ndarray:
    counts = np.bincount(owner, minlength=n_rows)
    table = np.full((n_rows, max(int(counts.max(initial=0)), 1)), pad, dtype=np.int64)
    order = np.argsort(owner, kind="stable")
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    slot = np.arange(owner.size) - np.repeat(starts, counts)
    table[owner[order], slot] = order
    return table


def _int_lines(text: str):
    for ln in text.splitlines():
        ln = ln.strip()
        if ln:
            try:
                yield [int(t) for t in ln.split()]
            except ValueError:
                raise AlistError(f"non-integer token in line {ln!r}") from None


def load_alist(content) -> ParityCheckMatrix:
    """Parse MacKay alist text (or a path to it).

    Layout: ``N M`` / ``max_col max_row`` / N column weights / M row
    weights / N lines of 1-based check indices / M lines of 1-based bit
    indices. Zero padding on the adjacency lines is accepted.
    """
    if isinstance(content, Path) or (isinstance(content, str) and "\n" not in content.strip()):
        content = Path(content).read_text()
    lines = list(_int_lines(content))
    if len(lines) < 4:
        raise AlistError("truncated alist header")
    try:
        (n, m), (max_c, max_r) = lines[0], lines[1]
    except ValueError:
        raise AlistError("malformed alist header") from None
    col_w, row_w = lines[2], lines[3]
    if len(col_w) != n or len(row_w) != m:
        raise AlistError("degree lists do not match the declared dimensions")
    if max(col_w, default=0) != max_c or max(row_w, default=0) != max_r:
        raise AlistError("declared maximum degrees disagree with the degree lists")
    if len(lines) < 4 + n + m:
        raise AlistError(f"truncated alist: expected {n + m} adjacency lines, found {len(lines) - 4}")
    cols = [[v - 1 for v in ln if v != 0] for ln in lines[4:4 + n]]
    rows = [[v - 1 for v in ln if v != 0] for ln in lines[4 + n:4 + n + m]]
    for i, (c, w) in enumerate(zip(cols, col_w)):
        if len(c) != w or any(not 0 <= r < m for r in c):
            raise AlistError(f"column {i + 1}: adjacency does not match weight {w}")
    for r, (c, w) in enumerate(zip(rows, row_w)):
        if len(c) != w or any(not 0 <= i < n for i in c):
            raise AlistError(f"row {r + 1}: adjacency does not match weight {w}")
    pcm = ParityCheckMatrix.from_check_lists(n, rows)
    if [sorted(c) for c in cols] != [list(v) for v in pcm.var_neighbors]:
        raise AlistError("row and column adjacency lists are inconsistent")
    return pcm


def dump_alist(pcm: ParityCheckMatrix) -> str:
    cw, rw = pcm.column_weights, pcm.row_weights
    out = [f"{pcm.n_bits} {pcm.n_checks}", f"{cw.max()} {rw.max()}",
           " ".join(map(str, cw)), " ".join(map(str, rw))]
    for v in pcm.var_neighbors:
        out.append(" ".join(str(r + 1) for r in v) + " 0" * (cw.max() - len(v)))
    for c in pcm.check_neighbors:
        out.append(" ".join(str(i + 1) for i in c) + " 0" * (rw.max() - len(c)))
    return "\n".join(out) + "\n"


BUNDLED = {
    1024: "peg_1024_3x6.alist",
    9216: "peg_9216_3x6.alist",
}


def bundled_code_path(length: int) -> Path:
    if length not in BUNDLED:
        raise KeyError(f"no bundled code of length {length}; have {sorted(BUNDLED)}")
    return Path(str(resources.files("scmaidd.data").joinpath(BUNDLED[length])))


def load_bundled(length: int = 1024) -> ParityCheckMatrix:
    return load_alist(bundled_code_path(length).read_text())
