import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rmpolar import gf2, kernel
from rmpolar.subsets import generator_matrix


def naive_undetermined(rows, masks):
    out = np.zeros((len(masks), len(rows)), dtype=np.uint8)
    for s, keep in enumerate(masks):
        basis = gf2.IncrementalBasis(max(1, max([r.bit_length() for r in rows] + [keep.bit_length()])))
        for i in range(len(rows) - 1, -1, -1):
            v = rows[i] & keep
            out[s, i] = basis.in_span(v)
            basis.insert(v)
    return out


def test_packing_roundtrip():
    vals = [0, 1, (1 << 100) | 5, (1 << 128) - 1]
    packed = kernel.pack_ints(vals, 130)
    assert packed.shape == (4, 3)
    bits = np.array([[v >> j & 1 for j in range(130)] for v in vals], dtype=bool)
    assert np.array_equal(kernel.pack_bool(bits), packed)


def test_backends_listed():
    assert "python" in kernel.BACKENDS
    assert kernel.BACKEND in kernel.BACKENDS
    with pytest.raises(ValueError):
        kernel.get_backend("fortran")


def test_no_erasures_everything_determined():
    n = 8
    rows = kernel.pack_ints(generator_matrix(3).rows, n)
    full = kernel.pack_ints([(1 << n) - 1], n)
    none = kernel.pack_ints([0], n)
    for fn in kernel.BACKENDS.values():
        assert not fn(rows, full).any()
        # all erased: only the all-zero restriction, so every row is in the span
        assert fn(rows, none).all()


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 6).flatmap(
        lambda r: st.tuples(
            st.lists(st.integers(0, (1 << 70) - 1), min_size=r, max_size=r),
            st.lists(st.integers(0, (1 << 70) - 1), min_size=1, max_size=5),
        )
    )
)
def test_backends_match_naive(data):
    rows, masks = data
    n = 70
    want = naive_undetermined(rows, masks)
    for fn in kernel.BACKENDS.values():
        got = fn(kernel.pack_ints(rows, n), kernel.pack_ints(masks, n))
        assert np.array_equal(got, want)


def test_backends_agree_on_rm_rows():
    rng = np.random.default_rng(3)
    n = 64
    rows = kernel.pack_ints(generator_matrix(6).rows, n)
    masks = kernel.pack_bool(rng.random((40, n)) > 0.45)
    outs = [fn(rows, masks) for fn in kernel.BACKENDS.values()]
    for o in outs[1:]:
        assert np.array_equal(o, outs[0])
