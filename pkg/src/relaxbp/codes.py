"""Sparse Tanner-graph representation of binary parity-check codes.

A code is stored as a bipartite adjacency structure (bits on one side,
parity checks on the other) kept in both directions, plus a dense edge
numbering used by the message-passing decoder.  Words use the spin
convention sigma in {+1, -1}, with +1 encoding logical zero; conversion
to {0, 1} happens only at I/O boundaries such as the alist format.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np


class CodeStructureError(ValueError):
    """Raised when an adjacency structure does not form a valid code graph."""


class AlistFormatError(ValueError):
    """Raised on malformed alist input; message carries the offending line."""


@dataclass(frozen=True)
class _DegreeGroup:
    """Nodes of one degree, with their incident edge ids as a dense matrix."""

    degree: int
    nodes: np.ndarray       # (g,) node indices sharing this degree
    edge_ids: np.ndarray    # (g, degree) edge ids in neighbor-list order
    neighbor_ids: np.ndarray  # (g, degree) opposite-side node per edge


class ParityCheckCode:
    """Immutable bipartite Tanner graph of an LDPC code.

    Edge ids are assigned in bit-major order: all edges of bit 0 first
    (in ``bit_neighbors[0]`` order), then bit 1, and so on.  Instances
    are safe to share across concurrent decoding runs.
    """

    def __init__(self, bit_neighbors: Sequence[Sequence[int]],
                 check_neighbors: Sequence[Sequence[int]]):
        self.bit_neighbors = tuple(tuple(int(a) for a in nbrs) for nbrs in bit_neighbors)
        self.check_neighbors = tuple(tuple(int(i) for i in nbrs) for nbrs in check_neighbors)
        self.n_bits = len(self.bit_neighbors)
        self.n_checks = len(self.check_neighbors)
        self._validate()

        self.bit_degrees = np.array([len(n) for n in self.bit_neighbors], dtype=np.int64)
        self.check_degrees = np.array([len(n) for n in self.check_neighbors], dtype=np.int64)
        self.n_edges = int(self.bit_degrees.sum())

        # Bit-major edge numbering and both endpoint arrays.
        self.edge_index: dict[tuple[int, int], int] = {}
        edge_bit = np.empty(self.n_edges, dtype=np.int64)
        edge_check = np.empty(self.n_edges, dtype=np.int64)
        e = 0
        for i, nbrs in enumerate(self.bit_neighbors):
            for a in nbrs:
                self.edge_index[(i, a)] = e
                edge_bit[e] = i
                edge_check[e] = a
                e += 1
        self.edge_bit = edge_bit
        self.edge_check = edge_check

    def _validate(self):
        bit_sets = []
        for i, nbrs in enumerate(self.bit_neighbors):
            s = set(nbrs)
            if len(s) != len(nbrs):
                raise CodeStructureError(f"bit {i} lists a check twice")
            for a in nbrs:
                if not 0 <= a < self.n_checks:
                    raise CodeStructureError(f"bit {i} references check {a} out of range")
            if not nbrs and self.n_checks > 0:
                raise CodeStructureError(f"bit {i} is isolated (degree 0)")
            bit_sets.append(s)
        seen_edges = 0
        for a, nbrs in enumerate(self.check_neighbors):
            s = set(nbrs)
            if len(s) != len(nbrs):
                raise CodeStructureError(f"check {a} lists a bit twice")
            for i in nbrs:
                if not 0 <= i < self.n_bits:
                    raise CodeStructureError(f"check {a} references bit {i} out of range")
                if a not in bit_sets[i]:
                    raise CodeStructureError(
                        f"edge ({i}, {a}) present on check side only")
            seen_edges += len(nbrs)
        if seen_edges != sum(len(n) for n in self.bit_neighbors):
            raise CodeStructureError("bit-side and check-side edge counts differ")

    @classmethod
    def from_check_neighbors(cls, n_bits: int,
                             check_neighbors: Sequence[Sequence[int]]) -> "ParityCheckCode":
        """Build a code from the check-side adjacency only.

        Bit neighbor lists are derived in ascending check order, which
        fixes a deterministic edge numbering.
        """
        bit_neighbors: list[list[int]] = [[] for _ in range(n_bits)]
        for a, nbrs in enumerate(check_neighbors):
            for i in nbrs:
                if not 0 <= i < n_bits:
                    raise CodeStructureError(f"check {a} references bit {i} out of range")
                bit_neighbors[i].append(a)
        return cls(bit_neighbors, check_neighbors)

    @classmethod
    def from_parity_matrix(cls, matrix) -> "ParityCheckCode":
        """Build a code from a dense 0/1 parity-check matrix (checks x bits)."""
        h = np.asarray(matrix)
        if h.ndim != 2:
            raise CodeStructureError("parity matrix must be two-dimensional")
        check_neighbors = [list(np.flatnonzero(row)) for row in h]
        return cls.from_check_neighbors(h.shape[1], check_neighbors)

    def parity_matrix(self) -> np.ndarray:
        """Dense uint8 parity-check matrix (n_checks x n_bits)."""
        h = np.zeros((self.n_checks, self.n_bits), dtype=np.uint8)
        for a, nbrs in enumerate(self.check_neighbors):
            h[a, list(nbrs)] = 1
        return h

    @cached_property
    def bit_groups(self) -> tuple[_DegreeGroup, ...]:
        """Bits grouped by degree, for vectorized per-bit aggregation."""
        return self._group(self.bit_neighbors, by_bit=True)

    @cached_property
    def check_groups(self) -> tuple[_DegreeGroup, ...]:
        """Checks grouped by degree, for vectorized per-check aggregation."""
        return self._group(self.check_neighbors, by_bit=False)

    def _group(self, neighbor_lists, by_bit: bool) -> tuple[_DegreeGroup, ...]:
        by_degree: dict[int, list[int]] = {}
        for node, nbrs in enumerate(neighbor_lists):
            if nbrs:
                by_degree.setdefault(len(nbrs), []).append(node)
        groups = []
        for degree in sorted(by_degree):
            nodes = np.array(by_degree[degree], dtype=np.int64)
            edge_ids = np.empty((len(nodes), degree), dtype=np.int64)
            neighbor_ids = np.empty((len(nodes), degree), dtype=np.int64)
            for row, node in enumerate(by_degree[degree]):
                for col, other in enumerate(neighbor_lists[node]):
                    key = (node, other) if by_bit else (other, node)
                    edge_ids[row, col] = self.edge_index[key]
                    neighbor_ids[row, col] = other
            groups.append(_DegreeGroup(degree, nodes, edge_ids, neighbor_ids))
        return tuple(groups)

    def __repr__(self):
        return (f"ParityCheckCode(n_bits={self.n_bits}, n_checks={self.n_checks}, "
                f"n_edges={self.n_edges})")


def parse_alist(text: str) -> ParityCheckCode:
    """Parse the alist sparse-matrix exchange format.

    Layout: line 1 ``N M``; line 2 ``max_bit_degree max_check_degree``;
    line 3 the N bit degrees; line 4 the M check degrees; then N lines
    of 1-indexed check neighbors per bit (zero-padded to the maximum
    bit degree) and M lines of 1-indexed bit neighbors per check
    (zero-padded likewise).  Zeros are padding and add no edge.

    Raises:
        AlistFormatError: malformed header, degree/list mismatch,
            out-of-range index, or duplicate edge, with the line number.
    """
    lines = text.splitlines()

    def ints(lineno: int, expect_len: int | None = None) -> list[int]:
        if lineno >= len(lines):
            raise AlistFormatError(f"line {lineno + 1}: unexpected end of input")
        try:
            values = [int(tok) for tok in lines[lineno].split()]
        except ValueError:
            raise AlistFormatError(f"line {lineno + 1}: non-integer token") from None
        if expect_len is not None and len(values) != expect_len:
            raise AlistFormatError(
                f"line {lineno + 1}: expected {expect_len} values, found {len(values)}")
        return values

    header = ints(0)
    if len(header) != 2 or header[0] <= 0 or header[1] <= 0:
        raise AlistFormatError("line 1: header must be two positive integers 'N M'")
    n_bits, n_checks = header
    max_degrees = ints(1)
    if len(max_degrees) != 2 or min(max_degrees) < 0:
        raise AlistFormatError("line 2: expected 'max_bit_degree max_check_degree'")
    bit_degrees = ints(2, n_bits)
    check_degrees = ints(3, n_checks)
    for lineno, degrees, cap in ((2, bit_degrees, max_degrees[0]),
                                 (3, check_degrees, max_degrees[1])):
        for k, d in enumerate(degrees):
            if d < 0 or d > cap:
                raise AlistFormatError(
                    f"line {lineno + 1}: degree {d} of entry {k + 1} outside 0..{cap}")

    def neighbor_rows(first_line: int, count: int, degrees: list[int], pad_to: int,
                      limit: int, what: str) -> list[list[int]]:
        rows = []
        for k in range(count):
            lineno = first_line + k
            row = ints(lineno)
            if len(row) not in (degrees[k], pad_to):
                raise AlistFormatError(
                    f"line {lineno + 1}: {what} {k + 1} lists {len(row)} entries, "
                    f"expected {degrees[k]} (or {pad_to} zero-padded)")
            nbrs = [v - 1 for v in row if v != 0]
            for v in row:
                if v < 0 or v > limit:
                    raise AlistFormatError(
                        f"line {lineno + 1}: index {v} out of range 1..{limit}")
            if len(nbrs) != degrees[k]:
                raise AlistFormatError(
                    f"line {lineno + 1}: {what} {k + 1} declares degree {degrees[k]} "
                    f"but lists {len(nbrs)} nonzero neighbors")
            if len(set(nbrs)) != len(nbrs):
                raise AlistFormatError(f"line {lineno + 1}: duplicate edge on {what} {k + 1}")
            rows.append(nbrs)
        return rows

    bit_neighbors = neighbor_rows(4, n_bits, bit_degrees, max_degrees[0],
                                  n_checks, "column")
    check_neighbors = neighbor_rows(4 + n_bits, n_checks, check_degrees,
                                    max_degrees[1], n_bits, "row")
    try:
        return ParityCheckCode(bit_neighbors, check_neighbors)
    except CodeStructureError as exc:
        raise AlistFormatError(f"inconsistent adjacency: {exc}") from exc


def emit_alist(code: ParityCheckCode) -> str:
    """Serialize a code to alist text (inverse of parse_alist)."""
    max_bit = int(code.bit_degrees.max(initial=0))
    max_check = int(code.check_degrees.max(initial=0))
    out = [f"{code.n_bits} {code.n_checks}", f"{max_bit} {max_check}"]
    out.append(" ".join(str(d) for d in code.bit_degrees))
    out.append(" ".join(str(d) for d in code.check_degrees))
    for nbrs in code.bit_neighbors:
        padded = [a + 1 for a in nbrs] + [0] * (max_bit - len(nbrs))
        out.append(" ".join(str(v) for v in padded))
    for nbrs in code.check_neighbors:
        padded = [i + 1 for i in nbrs] + [0] * (max_check - len(nbrs))
        out.append(" ".join(str(v) for v in padded))
    return "\n".join(out) + "\n"


def build_qc_code(circulant_size: int, exponents: Sequence[Sequence[int]]) -> ParityCheckCode:
    """Quasi-cyclic code from a table of circulant shift exponents.

    Block (r, c) of the parity matrix is the size-m identity cyclically
    shifted by ``exponents[r][c]``: check r*m + a touches bit
    c*m + (a + shift) mod m.  The result has R*m checks, C*m bits,
    every bit of degree R and every check of degree C.
    """
    m = int(circulant_size)
    if m <= 0:
        raise ValueError("circulant size must be positive")
    table = [list(row) for row in exponents]
    if not table or not table[0]:
        raise ValueError("exponent table must be nonempty")
    n_cols = len(table[0])
    for row in table:
        if len(row) != n_cols:
            raise ValueError("exponent table rows must have equal length")
        for s in row:
            if not 0 <= s < m:
                raise ValueError(f"shift exponent {s} outside [0, {m})")

    check_neighbors = []
    for r, row in enumerate(table):
        for a in range(m):
            check_neighbors.append([c * m + (a + s) % m for c, s in enumerate(row)])
    return ParityCheckCode.from_check_neighbors(n_cols * m, check_neighbors)


@lru_cache(maxsize=1)
def tanner_155_64() -> ParityCheckCode:
    """The (3,5)-regular quasi-cyclic [155, 64] code on 31-circulants.

    Shift table s[r][c] = (5**r * 2**c) mod 31 for r in 0..2, c in 0..4
    (5 has multiplicative order 3 and 2 has order 5 modulo 31).  The
    parity matrix has GF(2) rank 91, so the dimension is 155 - 91 = 64.
    """
    table = [[(pow(5, r, 31) * pow(2, c, 31)) % 31 for c in range(5)]
             for r in range(3)]
    return build_qc_code(31, table)


def syndrome(code: ParityCheckCode, word) -> np.ndarray:
    """Per-check parity products: entry a is the product of the spins in check a.

    The word is a codeword iff every entry is +1.
    """
    w = np.asarray(word)
    if w.shape != (code.n_bits,):
        raise ValueError(f"word length {w.shape} does not match n_bits={code.n_bits}")
    # Empty product convention: a degree-0 check is always satisfied.
    out = np.ones(code.n_checks, dtype=w.dtype if w.dtype.kind in "if" else np.int64)
    for group in code.check_groups:
        out[group.nodes] = w[group.neighbor_ids].prod(axis=1)
    return out


def is_codeword(code: ParityCheckCode, word) -> bool:
    """True iff every parity check multiplies to +1."""
    return bool(np.all(syndrome(code, word) == 1))


def gf2_rank(code_or_matrix) -> int:
    """Rank of the binary parity-check matrix over GF(2).

    Accepts a ParityCheckCode or a dense 0/1 matrix.  Plain Gaussian
    elimination with XOR row updates on uint8 rows.
    """
    if isinstance(code_or_matrix, ParityCheckCode):
        mat = code_or_matrix.parity_matrix()
    else:
        mat = (np.asarray(code_or_matrix, dtype=np.uint8) % 2).copy()
    rows, cols = mat.shape
    rank = 0
    for col in range(cols):
        pivot = -1
        for r in range(rank, rows):
            if mat[r, col]:
                pivot = r
                break
        if pivot < 0:
            continue
        if pivot != rank:
            mat[[rank, pivot]] = mat[[pivot, rank]]
        below = np.flatnonzero(mat[rank + 1:, col]) + rank + 1
        mat[below] ^= mat[rank]
        rank += 1
        if rank == rows:
            break
    return rank
