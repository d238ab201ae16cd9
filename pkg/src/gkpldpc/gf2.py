"""Exact linear algebra over GF(2).

Matrices are stored bit-packed into 64-bit words, one row per word array,
so row operations (the core of Gaussian elimination and of the matrix
product) are machine-word XORs.  A sparse per-row adjacency view is
available for consumers that walk the Tanner graph.

Also hosts the reader/writer for the `alist` sparse-matrix interchange
format used by LDPC tools.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

_WORD = 64


def _n_words(cols: int) -> int:
    return max(1, (cols + _WORD - 1) // _WORD)


def _pack(dense: np.ndarray) -> np.ndarray:
    """Pack a (rows, cols) 0/1 array into (rows, words) uint64, little-endian."""
    rows, cols = dense.shape
    padded_cols = _n_words(cols) * _WORD
    if cols != padded_cols:
        pad = np.zeros((rows, padded_cols - cols), dtype=np.uint8)
        dense = np.hstack([dense.astype(np.uint8), pad])
    packed = np.packbits(dense.astype(np.uint8), axis=1, bitorder="little")
    return packed.view(np.uint64).copy()


def _unpack(bits: np.ndarray, cols: int) -> np.ndarray:
    raw = np.unpackbits(bits.view(np.uint8), axis=1, bitorder="little")
    return raw[:, :cols].astype(np.uint8)


class BinaryMatrix:
    """Immutable matrix over GF(2) with bit-packed rows.

    Construct through :meth:`from_dense`, :meth:`zeros` or :meth:`identity`.
    All operations return new matrices; instances are safe to share across
    threads once built.
    """

    __slots__ = ("rows", "cols", "_bits")

    def __init__(self, bits: np.ndarray, cols: int):
        if bits.ndim != 2 or bits.dtype != np.uint64:
            raise ValueError("expected a (rows, words) uint64 array")
        if bits.shape[1] != _n_words(cols):
            raise ValueError("word count does not match column count")
        self.rows = bits.shape[0]
        self.cols = cols
        self._bits = bits
        self._bits.flags.writeable = False

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_dense(cls, array) -> "BinaryMatrix":
        dense = np.asarray(array)
        if dense.ndim == 1:
            dense = dense.reshape(1, -1)
        if dense.ndim != 2:
            raise ValueError("expected a 1-D or 2-D array of bits")
        if dense.size and not np.isin(dense, (0, 1)).all():
            raise ValueError("entries must be 0 or 1")
        return cls(_pack(dense), dense.shape[1])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BinaryMatrix":
        return cls(np.zeros((rows, _n_words(cols)), dtype=np.uint64), cols)

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    # -- element and row access --------------------------------------------

    def __getitem__(self, key) -> int:
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"({i}, {j}) out of range for {self.shape}")
        w, b = divmod(j, _WORD)
        return int((self._bits[i, w] >> np.uint64(b)) & np.uint64(1))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> np.ndarray:
        """Dense uint8 copy of the matrix."""
        return _unpack(self._bits, self.cols)

    def row_support(self, i: int) -> np.ndarray:
        """Sorted column indices of the nonzero entries of row i."""
        row = _unpack(self._bits[i : i + 1], self.cols)[0]
        return np.flatnonzero(row)

    def row_supports(self) -> list[np.ndarray]:
        """Sparse adjacency view: one index array per row."""
        dense = self.to_dense()
        return [np.flatnonzero(r) for r in dense]

    def row_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=1)

    def col_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0)

    # -- algebra -----------------------------------------------------------

    def transpose(self) -> "BinaryMatrix":
        return BinaryMatrix.from_dense(self.to_dense().T)

    def __matmul__(self, other: "BinaryMatrix") -> "BinaryMatrix":
        return mat_mul(self, other)

    def __xor__(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return BinaryMatrix(self._bits ^ other._bits, self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.cols == other.cols and np.array_equal(self._bits, other._bits)

    def __hash__(self):
        return hash((self.rows, self.cols, self._bits.tobytes()))

    def is_zero(self) -> bool:
        return not self._bits.any()

    def __repr__(self) -> str:
        return f"BinaryMatrix({self.rows}x{self.cols})"

    def rank(self) -> int:
        _, pivots = self.row_reduce()
        return len(pivots)

    def row_reduce(self) -> tuple["BinaryMatrix", tuple[int, ...]]:
        """Reduced row echelon form over GF(2).

        Pivots are located by scanning columns left to right and rows top
        down (no column permutation), so the result is deterministic and the
        pivot list is strictly increasing.  Returns (reduced, pivots).
        """
        bits = self._bits.copy()
        pivots = []
        r = 0
        for c in range(self.cols):
            if r == self.rows:
                break
            w, b = divmod(c, _WORD)
            col = (bits[r:, w] >> np.uint64(b)) & np.uint64(1)
            nz = np.flatnonzero(col)
            if nz.size == 0:
                continue
            p = r + int(nz[0])
            if p != r:
                bits[[r, p]] = bits[[p, r]]
            # clear column c in every other row that has it set
            full_col = (bits[:, w] >> np.uint64(b)) & np.uint64(1)
            full_col[r] = 0
            sel = full_col.astype(bool)
            if sel.any():
                bits[sel] ^= bits[r]
            pivots.append(c)
            r += 1
        return BinaryMatrix(bits, self.cols), tuple(pivots)


def mat_mul(a: BinaryMatrix, b: BinaryMatrix) -> BinaryMatrix:
    """Matrix product over GF(2): result[i, j] = parity of sum_k a[i,k] b[k,j].

    Implemented as an XOR accumulation of b's rows selected by each row of a,
    so the cost scales with the number of nonzeros in a.
    """
    if a.cols != b.rows:
        raise ValueError(
            f"dimension mismatch: {a.shape} @ {b.shape} (a.cols != b.rows)"
        )
    out = np.zeros((a.rows, b._bits.shape[1]), dtype=np.uint64)
    b_bits = b._bits
    for i in range(a.rows):
        sup = a.row_support(i)
        if sup.size:
            out[i] = np.bitwise_xor.reduce(b_bits[sup], axis=0)
    return BinaryMatrix(out, b.cols)


@dataclass(frozen=True)
class RowBasis:
    """Row-reduced basis of a matrix's row space, for membership tests.

    Because the basis is in reduced row echelon form, each pivot column is
    nonzero in exactly one basis row.  A vector v is in the row space iff
    XOR-ing the basis rows selected by v's bits at the pivot columns
    reproduces v, which is a single vectorized reduction.
    """

    reduced: BinaryMatrix
    pivots: tuple[int, ...]

    @classmethod
    def from_matrix(cls, m: BinaryMatrix) -> "RowBasis":
        reduced, pivots = m.row_reduce()
        keep = reduced._bits[: len(pivots)].copy()  # drop all-zero tail rows
        return cls(BinaryMatrix(keep, m.cols), pivots)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def contains(self, v) -> bool:
        return in_row_space(self, v)


def _as_row_bits(v, cols: int) -> np.ndarray:
    """Pack a row vector (BinaryMatrix, dense array, or bit sequence)."""
    if isinstance(v, BinaryMatrix):
        if v.rows != 1:
            raise ValueError("expected a single row vector")
        if v.cols != cols:
            raise ValueError(f"dimension mismatch: {v.cols} != {cols}")
        return v._bits[0]
    arr = np.asarray(v, dtype=np.uint8).reshape(1, -1)
    if arr.shape[1] != cols:
        raise ValueError(f"dimension mismatch: {arr.shape[1]} != {cols}")
    return _pack(arr)[0]

def in_row_space(basis: RowBasis, v) -> bool:
    """True iff v is a GF(2) linear combination of the basis rows."""
    cols = basis.reduced.cols
    bits = _as_row_bits(v, cols).copy()
    if not bits.any():
        return True
    if basis.rank == 0:
        return False
    acc = bits
    piv = np.asarray(basis.pivots)
    w, b = np.divmod(piv, _WORD)
    sel = ((acc[w] >> b.astype(np.uint64)) & np.uint64(1)).astype(bool)
    if sel.any():
        acc = acc ^ np.bitwise_xor.reduce(basis.reduced._bits[sel], axis=0)
    return not acc.any()


# -- alist interchange format ----------------------------------------------
#
# Layout (MacKay's convention, indices 1-based, zero-padded degree lists):
#   n m
#   max_col_degree max_row_degree
#   col degrees (n values)
#   row degrees (m values)
#   n lines: row indices of the nonzeros in each column
#   m lines: column indices of the nonzeros in each row


def write_alist(m: BinaryMatrix, path: str | os.PathLike) -> None:
    """Write the matrix in alist format (bit-exact round trip with read_alist)."""
    dense = m.to_dense()
    n_cols, n_rows = m.cols, m.rows
    col_sup = [np.flatnonzero(dense[:, j]) + 1 for j in range(n_cols)]
    row_sup = [np.flatnonzero(dense[i, :]) + 1 for i in range(n_rows)]
    max_col = max((len(s) for s in col_sup), default=0)
    max_row = max((len(s) for s in row_sup), default=0)

    def line(vals) -> str:
        return " ".join(str(int(v)) for v in vals)

    def padded(sup, width) -> str:
        return line(list(sup) + [0] * (width - len(sup)))

    out = [
        line([n_cols, n_rows]),
        line([max_col, max_row]),
        line(len(s) for s in col_sup),
        line(len(s) for s in row_sup),
    ]
    out += [padded(s, max_col) for s in col_sup]
    out += [padded(s, max_row) for s in row_sup]
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


def read_alist(path: str | os.PathLike) -> BinaryMatrix:
    """Read an alist file; accepts both the zero-padded and compact variants."""
    with open(path) as fh:
        vals = [int(t) for t in fh.read().split()]
    if len(vals) < 4:
        raise ValueError(f"truncated alist file: {path}")
    n_cols, n_rows, max_col, max_row = vals[:4]
    pos = 4
    col_deg = vals[pos : pos + n_cols]
    pos += n_cols
    row_deg = vals[pos : pos + n_rows]
    pos += n_rows
    body = vals[pos:]

    padded_len = n_cols * max_col + n_rows * max_row
    compact_len = sum(col_deg) + sum(row_deg)
    dense = np.zeros((n_rows, n_cols), dtype=np.uint8)
    if len(body) == padded_len:
        for j in range(n_cols):
            block = body[j * max_col : (j + 1) * max_col]
            for idx in block[: col_deg[j]]:
                dense[idx - 1, j] = 1
    elif len(body) == compact_len:
        k = 0
        for j in range(n_cols):
            for idx in body[k : k + col_deg[j]]:
                dense[idx - 1, j] = 1
            k += col_deg[j]
    else:
        raise ValueError(f"alist body length {len(body)} matches neither variant")
    # Only the column section is used to build the matrix; the row section
    # is redundant and validated by the round-trip tests instead.
    return BinaryMatrix.from_dense(dense)
