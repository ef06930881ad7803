import math
from fractions import Fraction

import numpy as np
import pytest

from rmpolar.channels import BEC, BSC, FiniteBMS, binary_entropy
from rmpolar.errors import CapacityError
from rmpolar.exact import (
    bec_conditional,
    exact_bec_profile,
    exact_bit_channel_error,
    exact_coset_profile,
    exact_conditional,
    exact_profile,
)
from rmpolar.polar import polar_bec_profile
from rmpolar.subsets import Subset, all_subsets

BMS3 = FiniteBMS(((0.6, 0.1), (0.1, 0.6), (0.3, 0.3)))


@pytest.mark.parametrize("eps", [0.0, 0.3, 1.0])
def test_m0_is_the_channel(eps):
    p = exact_profile(0, BEC(eps))
    assert p.H.tolist() == [eps]
    q = exact_profile(0, BSC(0.2))
    assert q.H[0] == pytest.approx(binary_entropy(0.2))
    assert q.Z[0] == pytest.approx(2 * math.sqrt(0.16))
    assert q.Pe[0] == pytest.approx(0.2)


def test_m1_bec():
    eps = 0.3
    p = exact_profile(1, BEC(eps))
    assert p.h(Subset.of(1, [1])) == pytest.approx(2 * eps - eps**2)
    assert p.h(Subset(1, 0)) == pytest.approx(eps**2)
    assert p.Pe[0] == pytest.approx((2 * eps - eps**2) / 2)
    assert p.meta["exact"][1] == Fraction(2 * eps) - Fraction(eps) ** 2


def test_m1_bsc():
    p = 0.11
    prof = exact_profile(1, BSC(p))
    q = 2 * p * (1 - p)
    assert prof.H[0] == pytest.approx(binary_entropy(q), abs=1e-12)
    assert prof.H[1] == pytest.approx(2 * binary_entropy(p) - binary_entropy(q), abs=1e-12)
    z = 2 * math.sqrt(p * (1 - p))
    assert prof.Z[1] == pytest.approx(z * z, abs=1e-12)
    assert prof.Pe[0] == pytest.approx(q, abs=1e-12)


def test_example_values_m2_half():
    p = exact_profile(2, BEC(0.5))
    assert p.H.tolist() == [0.9375, 0.5625, 0.4375, 0.0625]


@pytest.mark.parametrize("m", range(5))
def test_degenerate_bsc(m):
    assert np.all(exact_profile(m, BSC(0.0)).H == 0)
    assert np.allclose(exact_profile(m, BSC(0.5)).H, 1.0)


@pytest.mark.parametrize("ch", [BEC(0.4), BSC(0.11), BSC(0.3)])
@pytest.mark.parametrize("m", range(5))
def test_sum_rule(m, ch):
    prof = exact_profile(m, ch)
    assert prof.total_entropy() == pytest.approx((1 << m) * (1 - ch.capacity()), abs=1e-9)


def test_bec_sum_rule_rational():
    prof = exact_bec_profile(4, 0.4)
    assert sum(prof.meta["exact"].values()) == 16 * Fraction(0.4)


@pytest.mark.parametrize("m", range(1, 4))
def test_coset_engine_matches_exhaustive_on_bec(m):
    a = exact_bec_profile(m, 0.37)
    b = exact_coset_profile(m, BEC(0.37))
    assert np.allclose(a.H, b.H, atol=1e-12)


def test_coset_budget():
    with pytest.raises(CapacityError):
        exact_coset_profile(4, BEC(0.4))
    with pytest.raises(CapacityError):
        exact_profile(5, BSC(0.1))


@pytest.mark.parametrize("m", range(5))
def test_kronecker_order_is_polar(m):
    ex = exact_bec_profile(m, 0.4, order="kronecker")
    pol = polar_bec_profile(m, 0.4)
    assert np.allclose(ex.H, pol.H, atol=1e-14)


def test_conditional_with_prefix_equals_profile():
    m = 3
    for ch in (BEC(0.4), BSC(0.11), BMS3):
        prof = exact_profile(m, ch)
        subs = all_subsets(m)
        for i, a in enumerate(subs):
            h, z, pe = exact_conditional(m, ch, a, subs[:i])
            assert h == pytest.approx(prof.H[i], abs=1e-10)
            assert z == pytest.approx(prof.Z[i], abs=1e-10)
            assert pe == pytest.approx(prof.Pe[i], abs=1e-10)


def test_more_knowledge_never_hurts():
    m, ch = 3, BSC(0.2)
    target = Subset.of(m, [2])
    base = exact_conditional(m, ch, target, [Subset.of(m, [1, 2, 3])])[0]
    more = exact_conditional(m, ch, target, [Subset.of(m, [1, 2, 3]), Subset.of(m, [1])])[0]
    assert more <= base + 1e-12
    with pytest.raises(ValueError):
        exact_conditional(m, ch, target, [target])


def test_bec_conditional_without_knowledge():
    # x = (u_empty + u_1, u_empty): u_empty alone is recoverable only from the second symbol
    eps = Fraction(1, 3)
    assert bec_conditional(1, eps, Subset(1, 0), []) == eps
    # knowing u_1 also unlocks the first symbol
    assert bec_conditional(1, eps, Subset(1, 0), [Subset.of(1, [1])]) == eps**2


def test_bit_channel_error():
    assert exact_bit_channel_error(2, Subset(2, 0), BSC(0.0)) == 0.0
    pe = exact_bit_channel_error(1, Subset.of(1, [1]), BEC(0.5))
    assert pe == pytest.approx((1 - 0.25) / 2)
