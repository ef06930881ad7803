"""GF(2) linear algebra on int bitsets.

A vector of length ``n`` is a non-negative int below ``2**n``; bit ``j`` is
component ``j``. Matrices are lists of row ints.
"""

from __future__ import annotations

import enum
from typing import Iterable, Sequence

from .errors import SingularMatrixError

MAX_LENGTH = 1 << 16


class InsertResult(enum.Enum):
    INSERTED = "inserted"
    ALREADY_IN_SPAN = "already_in_span"


def _check_vector(v: int, length: int) -> None:
    if v < 0 or v >> length:
        raise ValueError(f"vector does not fit in length {length}")


class IncrementalBasis:
    """Echelon basis keyed by leading (highest) bit.

    Each stored row has a distinct leading bit, so reducing a query vector
    takes at most ``rank`` XORs.
    """

    def __init__(self, length: int):
        if not 0 <= length <= MAX_LENGTH:
            raise ValueError(f"length must lie in [0, {MAX_LENGTH}]")
        self.length = length
        self._pivots: dict[int, int] = {}

    @property
    def rank(self) -> int:
        return len(self._pivots)

    @property
    def rows(self) -> list[int]:
        return [self._pivots[b] for b in sorted(self._pivots, reverse=True)]

    def reduce(self, v: int) -> int:
        _check_vector(v, self.length)
        pivots = self._pivots
        while v:
            top = v.bit_length() - 1
            row = pivots.get(top)
            if row is None:
                return v
            v ^= row
        return 0

    def in_span(self, v: int) -> bool:
        return self.reduce(v) == 0

    def insert(self, v: int) -> InsertResult:
        r = self.reduce(v)
        if r == 0:
            return InsertResult.ALREADY_IN_SPAN
        self._pivots[r.bit_length() - 1] = r
        return InsertResult.INSERTED

    def copy(self) -> "IncrementalBasis":
        other = IncrementalBasis(self.length)
        other._pivots = dict(self._pivots)
        return other


def rank(rows: Iterable[int], length: int | None = None) -> int:
    rows = list(rows)
    if length is None:
        length = max((r.bit_length() for r in rows), default=0)
    basis = IncrementalBasis(length)
    for r in rows:
        basis.insert(r)
    return basis.rank


def in_span(rows: Iterable[int], v: int, length: int) -> bool:
    basis = IncrementalBasis(length)
    for r in rows:
        basis.insert(r)
    return basis.in_span(v)


def restrict_columns(v: int, keep: Iterable[int], length: int) -> int:
    """Keep only the listed columns, packed in ascending column order."""
    _check_vector(v, length)
    out = 0
    for pos, col in enumerate(sorted(set(keep))):
        if not 0 <= col < length:
            raise ValueError(f"column {col} outside [0, {length})")
        out |= (v >> col & 1) << pos
    return out


def multiply(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Matrix product over GF(2); ``a`` has ``len(b)`` columns."""
    out = []
    for row in a:
        acc = 0
        j = 0
        while row:
            if row & 1:
                if j >= len(b):
                    raise ValueError("inner dimensions do not match")
                acc ^= b[j]
            row >>= 1
            j += 1
        out.append(acc)
    return out


def identity(n: int) -> list[int]:
    return [1 << i for i in range(n)]


def invert(a: Sequence[int]) -> list[int]:
    """Inverse of a square GF(2) matrix by Gauss-Jordan elimination."""
    n = len(a)
    work = list(a)
    inv = identity(n)
    for col in range(n):
        bit = 1 << col
        pivot = next((r for r in range(col, n) if work[r] & bit), None)
        if pivot is None:
            raise SingularMatrixError(f"matrix is singular (no pivot in column {col})")
        work[col], work[pivot] = work[pivot], work[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        for r in range(n):
            if r != col and work[r] & bit:
                work[r] ^= work[col]
                inv[r] ^= inv[col]
    return inv


def popcount(v: int) -> int:
    return bin(v).count("1")


def parity(v: int) -> int:
    return popcount(v) & 1


def to_bits(v: int, length: int) -> list[int]:
    return [v >> j & 1 for j in range(length)]


def from_bits(bits: Iterable[int]) -> int:
    out = 0
    for j, b in enumerate(bits):
        if b & 1:
            out |= 1 << j
    return out
