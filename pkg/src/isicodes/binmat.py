"""Dense GF(2) matrices with rows packed into Python ints.

Bit ``c`` of a row int is the entry in column ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class BinaryMatrix:
    rows: Tuple[int, ...]
    ncols: int

    def __post_init__(self):
        limit = 1 << self.ncols
        for r in self.rows:
            if not 0 <= r < limit:
                raise ValueError(f"row {r:#x} does not fit in {self.ncols} columns")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.rows), self.ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BinaryMatrix":
        return cls((0,) * nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def from_array(cls, array) -> "BinaryMatrix":
        arr = np.asarray(array, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        rows = tuple(sum(int(b & 1) << c for c, b in enumerate(row)) for row in arr)
        return cls(rows, arr.shape[1])

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for c in range(self.ncols):
                out[i, c] = (r >> c) & 1
        return out

    def __getitem__(self, idx: Tuple[int, int]) -> int:
        i, j = idx
        return (self.rows[i] >> j) & 1

    def __add__(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return BinaryMatrix(tuple(a ^ b for a, b in zip(self.rows, other.rows)), self.ncols)

    __sub__ = __add__

    def is_zero(self) -> bool:
        return not any(self.rows)

    def column_is_zero(self, c: int) -> bool:
        return all(not (r >> c) & 1 for r in self.rows)

    def tail_is_zero(self, nu: int) -> bool:
        """True when the last ``nu`` columns are all zero."""
        if nu == 0:
            return True
        tail = ((1 << nu) - 1) << (self.ncols - nu)
        return all(not r & tail for r in self.rows)

    def transpose(self) -> "BinaryMatrix":
        cols = []
        for c in range(self.ncols):
            v = 0
            for i, r in enumerate(self.rows):
                v |= ((r >> c) & 1) << i
            cols.append(v)
        return BinaryMatrix(tuple(cols), self.nrows)

    def __str__(self) -> str:
        return "\n".join(
            " ".join(str((r >> c) & 1) for c in range(self.ncols)) for r in self.rows
        )

    def to_hex(self) -> str:
        return pack_bits_hex(self.rows, self.ncols)

    @classmethod
    def from_hex(cls, text: str, nrows: int, ncols: int) -> "BinaryMatrix":
        return cls(unpack_bits_hex(text, nrows, ncols), ncols)


def binary_rank(m: BinaryMatrix | Sequence[int]) -> int:
    """Rank over GF(2) by elimination on packed rows.

    Each pivot row is XORed into every later row sharing its lowest set bit,
    so the loop runs once per pivot.
    """
    rows = list(m.rows if isinstance(m, BinaryMatrix) else m)
    rank = 0
    while rows:
        pivot = rows.pop()
        if not pivot:
            continue
        rank += 1
        low = pivot & -pivot
        rows = [r ^ pivot if r & low else r for r in rows]
    return rank


def row_echelon(rows: Iterable[int]) -> List[int]:
    """Reduced basis of the row space; each basis row has a distinct leading bit."""
    basis: List[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis = [min(b, b ^ r) for b in basis]
            basis.append(r)
    return sorted(basis, reverse=True)


def in_row_span(vec: int, rows: Sequence[int]) -> bool:
    for b in row_echelon(rows):
        vec = min(vec, vec ^ b)
    return vec == 0


def right_kernel(rows: Sequence[int], ncols: int) -> List[int]:
    """Basis of {x : M x = 0} for M given by packed rows, as ncols-bit ints.

    The basis is returned in the canonical order of increasing free-column
    index; basis vector k has a one at free column k and zeros at the other
    free columns.
    """
    pivots: dict[int, int] = {}  # pivot column -> reduced row
    for r in rows:
        for col, prow in pivots.items():
            if (r >> col) & 1:
                r ^= prow
        if not r:
            continue
        col = (r & -r).bit_length() - 1
        for c in list(pivots):
            if (pivots[c] >> col) & 1:
                pivots[c] ^= r
        pivots[col] = r
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = 1 << fcol
        for pcol, prow in pivots.items():
            if (prow >> fcol) & 1:
                v |= 1 << pcol
        basis.append(v)
    return basis


def left_nullspace(m: BinaryMatrix) -> List[int]:
    """Basis of {b : b^T M = 0}; bit i of each vector weights row i."""
    return right_kernel(m.transpose().rows, m.nrows)


def span(basis: Sequence[int]) -> List[int]:
    """All GF(2) combinations of ``basis``, index k selecting basis bits of k."""
    out = [0]
    for b in basis:
        out += [v ^ b for v in out]
    return out


def combination(basis: Sequence[int], index: int) -> int:
    v = 0
    k = 0
    while index:
        if index & 1:
            v ^= basis[k]
        index >>= 1
        k += 1
    return v


def pack_bits_hex(rows: Sequence[int], ncols: int) -> str:
    """Row-major bitstring (row 0 column 0 first) read as a big-endian number."""
    value = 0
    for r in rows:
        for c in range(ncols):
            value = (value << 1) | ((r >> c) & 1)
    width = max(1, (len(rows) * ncols + 3) // 4)
    return f"{value:0{width}x}"


def unpack_bits_hex(text: str, nrows: int, ncols: int) -> Tuple[int, ...]:
    value = int(text, 16)
    n = nrows * ncols
    if value >> n:
        raise ValueError(f"hex {text!r} has more than {n} bits")
    rows = []
    for i in range(nrows):
        r = 0
        for c in range(ncols):
            pos = n - 1 - (i * ncols + c)
            r |= ((value >> pos) & 1) << c
        rows.append(r)
    return tuple(rows)
