from fractions import Fraction

import numpy as np
import pytest

from rmpolar.channels import BEC, BSC, FiniteBMS
from rmpolar.errors import CapacityError
from rmpolar.polar import (
    interior_count,
    mean_erasure,
    minus,
    plus,
    polar_bec_exact,
    polar_bec_profile,
    polar_bec_values,
    polar_vs_rm_transition,
    sorted_profile,
    verify_polar_bounds,
)
from rmpolar.subsets import Subset


def test_single_step():
    assert minus(0.5) == 0.75 and plus(0.5) == 0.25
    assert polar_bec_values(1, 0.5).tolist() == [0.25, 0.75]


def test_leaves_follow_paths():
    # element i in the subset means the "-" branch at level i
    m, eps = 3, Fraction(2, 5)
    vals = polar_bec_exact(m, eps)
    for mask in range(1 << m):
        x = eps
        for level in range(m):
            x = minus(x) if mask >> level & 1 else plus(x)
        assert vals[mask] == x


@pytest.mark.parametrize("m", [1, 5, 10])
def test_conservation_exact(m):
    eps = Fraction(2, 5)
    vals = polar_bec_exact(m, eps)
    assert sum(vals) == (1 << m) * eps
    assert all(0 <= v <= 1 for v in vals)


def test_float_values_match_rationals():
    ex = polar_bec_exact(8, Fraction(3, 10))
    fl = polar_bec_values(8, 0.3)
    assert np.allclose(fl, [float(v) for v in ex], atol=1e-14)
    assert mean_erasure(polar_bec_values(12, 0.3)) == pytest.approx(0.3, abs=1e-12)


def test_large_m_limits():
    assert len(polar_bec_values(20, 0.5)) == 1 << 20
    with pytest.raises(CapacityError):
        polar_bec_values(21, 0.5)
    with pytest.raises(CapacityError):
        polar_bec_profile(17, 0.5)


def test_profile_view():
    prof = polar_bec_profile(2, 0.5)
    assert prof.h(Subset.of(2, [1, 2])) == minus(minus(0.5)) == 0.9375
    assert prof.h(Subset(2, 0)) == plus(plus(0.5))
    assert np.array_equal(prof.Z, prof.H)


def test_sorting_and_interior():
    s = sorted_profile([0.1, 0.9, 0.5])
    assert s.tolist() == [0.9, 0.5, 0.1]
    assert interior_count([0.05, 0.5, 0.95, 0.1], 0.1) == 1


def test_rm_narrower_than_polar_small_m():
    wp, wr = polar_vs_rm_transition(4, 0.4, 0.1)
    assert wp > 0 and wr > 0


@pytest.mark.parametrize(
    "ch", [BEC(0.4), BSC(0.11), BSC(0.0), FiniteBMS(((0.6, 0.1), (0.1, 0.6), (0.3, 0.3)))],
    ids=lambda c: c.spec,
)
def test_one_step_bounds(ch):
    rep = verify_polar_bounds(3, ch)
    assert rep.ok, [c for c in rep.checks if not c.ok]
    assert len(rep.checks) > 40


def test_one_step_bounds_limit():
    with pytest.raises(CapacityError):
        verify_polar_bounds(4, BEC(0.4))
