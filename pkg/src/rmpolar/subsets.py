"""Subsets of [m], the RM total and partial orders, and monomial rows.

A subset A of {1, ..., m} is stored as a bitmask where bit ``i - 1`` marks
element ``i``. Row vectors of length ``n = 2**m`` are Python ints where bit
``j`` is column ``j``. Column ``j`` is the evaluation point z whose binary
expansion ``z_1 z_2 ... z_m`` (z_1 most significant) equals ``n - 1 - j``, so
columns run from (1, ..., 1) down to (0, ..., 0).
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, NamedTuple, Sequence

from .errors import CapacityError

MAX_M = 16


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _check_m(m: int) -> None:
    if not 0 <= m <= MAX_M:
        raise CapacityError(f"m must lie in [0, {MAX_M}], got {m}")


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _sort_key(m: int, mask: int) -> tuple:
    # larger sets first; within a layer, lexicographic on descending elements
    desc = tuple(i for i in range(m, 0, -1) if mask >> (i - 1) & 1)
    return (-len(desc), desc)


@functools.total_ordering
@dataclass(frozen=True)
class Subset:
    """A subset of [m]. ``<`` is the RM total order."""

    m: int
    mask: int

    def __post_init__(self):
        _check_m(self.m)
        if self.mask < 0 or self.mask >> self.m:
            raise ValueError(f"mask {self.mask:#x} has elements outside [1, {self.m}]")

    @classmethod
    def of(cls, m: int, elements: Iterable[int] = ()) -> "Subset":
        mask = 0
        for e in elements:
            if not 1 <= e <= m:
                raise ValueError(f"element {e} outside [1, {m}]")
            mask |= 1 << (e - 1)
        return cls(m, mask)

    @classmethod
    def full(cls, m: int) -> "Subset":
        return cls(m, (1 << m) - 1)

    @classmethod
    def from_hex(cls, m: int, text: str) -> "Subset":
        return cls(m, int(text, 16))

    def to_hex(self) -> str:
        return format(self.mask, "x")

    @property
    def elements(self) -> tuple[int, ...]:
        """Elements in ascending order."""
        return tuple(i for i in range(1, self.m + 1) if self.mask >> (i - 1) & 1)

    def __len__(self) -> int:
        return _popcount(self.mask)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, element: int) -> bool:
        return 1 <= element <= self.m and bool(self.mask >> (element - 1) & 1)

    def union(self, other: "Subset | Iterable[int]") -> "Subset":
        if isinstance(other, Subset):
            if other.m != self.m:
                raise ValueError("subsets over different ground sets")
            return Subset(self.m, self.mask | other.mask)
        return Subset(self.m, self.mask | Subset.of(self.m, other).mask)

    def lift(self, m: int) -> "Subset":
        """The same elements viewed as a subset of [m] (m >= self.m)."""
        if m < self.m:
            raise ValueError("cannot lift to a smaller ground set")
        return Subset(m, self.mask)

    def sort_key(self) -> tuple:
        return _sort_key(self.m, self.mask)

    def __lt__(self, other: "Subset") -> bool:
        return total_order_cmp(self, other) is Ordering.LESS

    def __repr__(self) -> str:
        inner = ",".join(str(e) for e in reversed(self.elements))
        return f"Subset(m={self.m}, {{{inner}}})"


def total_order_cmp(a: Subset, b: Subset) -> Ordering:
    """Compare two subsets in the RM decoding order.

    ``a`` precedes ``b`` when it is larger, or equally large and its
    descending element list is lexicographically smaller.
    """
    if a.m != b.m:
        raise ValueError(f"subsets over different ground sets: m={a.m} vs m={b.m}")
    ka, kb = a.sort_key(), b.sort_key()
    if ka < kb:
        return Ordering.LESS
    if ka > kb:
        return Ordering.GREATER
    return Ordering.EQUAL


def partial_order_precedes(a: Subset, b: Subset) -> bool:
    """True iff ``a`` strictly precedes ``b`` in the partial order.

    Requires ``|a| >= |b|`` and, with both lists ascending, ``a_i <= b_i`` for
    every ``i <= |b|``. Equal subsets are not related.
    """
    if a.m != b.m:
        raise ValueError(f"subsets over different ground sets: m={a.m} vs m={b.m}")
    if a.mask == b.mask:
        return False
    ea, eb = a.elements, b.elements
    if len(ea) < len(eb):
        return False
    return all(x <= y for x, y in zip(ea, eb))


@functools.lru_cache(maxsize=None)
def ordered_masks(m: int) -> tuple[int, ...]:
    """All subset masks of [m] sorted by the total order."""
    _check_m(m)
    return tuple(sorted(range(1 << m), key=lambda mask: _sort_key(m, mask)))


@functools.lru_cache(maxsize=None)
def rank_of_mask(m: int) -> tuple[int, ...]:
    """Inverse of :func:`ordered_masks`: ``rank_of_mask(m)[mask]``."""
    order = ordered_masks(m)
    ranks = [0] * len(order)
    for r, mask in enumerate(order):
        ranks[mask] = r
    return tuple(ranks)


def all_subsets(m: int) -> list[Subset]:
    """Every subset of [m], in total order."""
    return [Subset(m, mask) for mask in ordered_masks(m)]


def point_set_mask(m: int, column: int) -> int:
    """Mask of {i : z_i = 1} for the evaluation point at ``column``."""
    zbits = (1 << m) - 1 - column
    mask = 0
    for i in range(1, m + 1):
        if zbits >> (m - i) & 1:
            mask |= 1 << (i - 1)
    return mask


@functools.lru_cache(maxsize=None)
def coordinate_masks(m: int) -> tuple[int, ...]:
    """``coordinate_masks(m)[i - 1]`` has bit j set iff z_i = 1 at column j."""
    n = 1 << m
    out = []
    for i in range(1, m + 1):
        half = 1 << (m - i)
        period = half << 1
        block = (1 << half) - 1
        out.append(block * (((1 << n) - 1) // ((1 << period) - 1)))
    return tuple(out)


def _row(m: int, mask: int) -> int:
    row = (1 << (1 << m)) - 1
    for i, zi in enumerate(coordinate_masks(m)):
        if mask >> i & 1:
            row &= zi
    return row


@functools.lru_cache(maxsize=64)
def _monomial_rows(m: int) -> tuple[int, ...]:
    return tuple(_row(m, mask) for mask in range(1 << m))


def monomial_row_mask(m: int, mask: int) -> int:
    _check_m(m)
    return _row(m, mask)


def monomial_row(m: int, a: Subset) -> int:
    """Evaluation vector of prod_{i in a} z_i as an int (bit j = column j)."""
    _check_m(m)
    if a.m != m:
        raise ValueError(f"subset over [{a.m}] used with m={m}")
    return _row(m, a.mask)


def kronecker_row_subset(m: int, r: int) -> int:
    """Subset mask of row ``r`` of [[1,0],[1,1]]^{(x)m}."""
    mask = 0
    for i in range(1, m + 1):
        if not (r >> (m - i)) & 1:
            mask |= 1 << (i - 1)
    return mask


@functools.lru_cache(maxsize=None)
def kronecker_masks(m: int) -> tuple[int, ...]:
    """Subset masks in the top-to-bottom row order of the polar matrix."""
    _check_m(m)
    return tuple(kronecker_row_subset(m, r) for r in range(1 << m))


class RowOrder(enum.Enum):
    RM_TOTAL = "rm"
    KRONECKER = "kronecker"


class GeneratorMatrix(NamedTuple):
    rows: list[int]
    subsets: list[Subset]
    # rows[i] == other_order_rows[permutation[i]]
    permutation: list[int]


def generator_matrix(m: int, order: RowOrder | str = RowOrder.RM_TOTAL) -> GeneratorMatrix:
    """The full 2^m x 2^m monomial matrix in the requested row order.

    ``permutation`` maps each row to its position under the other order.
    """
    _check_m(m)
    order = RowOrder(order)
    rm, kron = ordered_masks(m), kronecker_masks(m)
    masks, other = (rm, kron) if order is RowOrder.RM_TOTAL else (kron, rm)
    pos_other = {mask: i for i, mask in enumerate(other)}
    rows = [_monomial_rows(m)[mask] for mask in masks]
    return GeneratorMatrix(rows, [Subset(m, x) for x in masks], [pos_other[x] for x in masks])


def rm_row_set(m: int, r: int) -> set[Subset]:
    """Index set of the basis of the order-r Reed-Muller code R(m, r)."""
    _check_m(m)
    if not 0 <= r <= m:
        raise ValueError(f"order r must lie in [0, {m}], got {r}")
    return {Subset(m, mask) for mask in range(1 << m) if _popcount(mask) <= r}


def rm_dimension(m: int, r: int) -> int:
    if r < 0:
        return 0
    return sum(comb(m, i) for i in range(min(r, m) + 1))


@dataclass(frozen=True)
class Chain:
    """An increasing chain empty = A_0 < A_1 < ... < A_m = [m] with |A_i| = i."""

    m: int
    sets: tuple[Subset, ...]

    def __post_init__(self):
        if len(self.sets) != self.m + 1:
            raise ValueError(f"chain over [{self.m}] needs {self.m + 1} sets")
        prev = 0
        for i, s in enumerate(self.sets):
            if s.m != self.m or len(s) != i or s.mask & prev != prev:
                raise ValueError(f"not an increasing chain at position {i}")
            prev = s.mask

    def permutation(self) -> tuple[int, ...]:
        """pi with A_i = {pi(1), ..., pi(i)}."""
        out = []
        for lo, hi in zip(self.sets, self.sets[1:]):
            out.append((hi.mask ^ lo.mask).bit_length())
        return tuple(out)


def chain_from_permutation(perm: Sequence[int]) -> Chain:
    """Chain A_i = {perm[0], ..., perm[i-1]} for a permutation of 1..m."""
    m = len(perm)
    if sorted(perm) != list(range(1, m + 1)):
        raise ValueError(f"{tuple(perm)} is not a permutation of 1..{m}")
    sets, mask = [Subset(m, 0)], 0
    for p in perm:
        mask |= 1 << (p - 1)
        sets.append(Subset(m, mask))
    return Chain(m, tuple(sets))


def canonical_chains(m: int) -> tuple[Chain, Chain]:
    """Prefix chain {1},{1,2},... and suffix chain {m},{m-1,m},..."""
    if m < 1:
        raise ValueError("canonical chains need m >= 1")
    return (
        chain_from_permutation(list(range(1, m + 1))),
        chain_from_permutation(list(range(m, 0, -1))),
    )


def all_chains(m: int):
    """Iterate over all m! increasing chains."""
    for perm in itertools.permutations(range(1, m + 1)):
        yield chain_from_permutation(perm)


def format_matrix(rows: Sequence[int], ncols: int) -> str:
    """Rows as '0'/'1' strings, column 0 first, one row per line."""
    return "\n".join("".join("1" if r >> j & 1 else "0" for j in range(ncols)) for r in rows)


def parse_matrix(text: str) -> tuple[list[int], int]:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    ncols = len(lines[0]) if lines else 0
    rows = []
    for ln in lines:
        if len(ln) != ncols or set(ln) - {"0", "1"}:
            raise ValueError(f"bad matrix row {ln!r}")
        rows.append(sum(1 << j for j, ch in enumerate(ln) if ch == "1"))
    return rows, ncols
