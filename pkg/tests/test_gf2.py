import itertools

import pytest
from hypothesis import given, strategies as st

from rmpolar import gf2
from rmpolar.errors import SingularMatrixError
from rmpolar.gf2 import IncrementalBasis, InsertResult
from rmpolar.subsets import RowOrder, generator_matrix


def vec(text):
    return gf2.from_bits(int(c) for c in text)


def test_empty_basis():
    b = IncrementalBasis(4)
    assert b.in_span(0)
    assert not b.in_span(vec("1000"))
    assert gf2.rank([]) == 0


def test_span_example():
    b = IncrementalBasis(4)
    for r in ("1100", "1010", "1111"):
        b.insert(vec(r))
    assert not b.in_span(vec("1000"))
    assert b.in_span(vec("1001"))


def test_insert_results():
    b = IncrementalBasis(5)
    v = vec("10110")
    assert b.insert(v) is InsertResult.INSERTED
    assert b.rank == 1
    assert b.insert(v) is InsertResult.ALREADY_IN_SPAN
    assert b.rank == 1
    with pytest.raises(ValueError):
        b.insert(1 << 5)
    with pytest.raises(ValueError):
        b.in_span(1 << 7)


@pytest.mark.parametrize("m", range(6))
def test_generator_rows_full_rank(m):
    b = IncrementalBasis(1 << m)
    for r in generator_matrix(m).rows:
        assert b.insert(r) is InsertResult.INSERTED
    assert b.rank == 1 << m


def test_restrict_columns():
    v = vec("10110")
    assert gf2.restrict_columns(v, range(5), 5) == v
    assert gf2.restrict_columns(v, [], 5) == 0
    assert gf2.to_bits(gf2.restrict_columns(v, {0, 2, 3}, 5), 3) == [1, 1, 1]
    with pytest.raises(ValueError):
        gf2.restrict_columns(v, [5], 5)


def test_rank_of_example_basis_and_inverse():
    assert gf2.rank(generator_matrix(3).rows, 8) == 8
    g4 = generator_matrix(4, RowOrder.KRONECKER).rows
    assert gf2.invert(g4) == g4
    rm = generator_matrix(4).rows
    assert gf2.multiply(gf2.invert(rm), rm) == gf2.identity(16)
    with pytest.raises(SingularMatrixError):
        gf2.invert([0b11, 0b11])


def naive_rank(rows):
    span = {0}
    for r in rows:
        span |= {s ^ r for s in span}
    return len(span).bit_length() - 1


@given(st.lists(st.integers(0, (1 << 10) - 1), max_size=8))
def test_rank_matches_naive_span(rows):
    assert gf2.rank(rows, 10) == naive_rank(rows)
    assert gf2.rank(rows, 10) <= min(len(rows), 10)


@given(st.lists(st.integers(0, 255), max_size=6), st.integers(0, 255))
def test_insert_then_in_span(rows, v):
    b = IncrementalBasis(8)
    for r in rows:
        b.insert(r)
    naive = any(
        (lambda acc: acc == v)(sum_xor)
        for sum_xor in (
            _xor(c) for k in range(len(rows) + 1) for c in itertools.combinations(rows, k)
        )
    )
    assert b.in_span(v) == naive
    if b.insert(v) is InsertResult.INSERTED:
        assert b.in_span(v)


def _xor(items):
    acc = 0
    for x in items:
        acc ^= x
    return acc
