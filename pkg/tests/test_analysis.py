import numpy as np
import pytest

from rmpolar.analysis import (
    chain_membership_counts,
    check_chain_counts,
    check_conditioning,
    check_interlacing,
    check_layer_separation,
    check_partial_order,
    check_pointwise,
    check_symmetry,
    check_total_order,
    gap_check,
    layer_stats,
    polarization_fraction,
    profile_suite,
    separating_deltas,
    strict_gap_probe,
    theta_report,
    twin_select,
)
from rmpolar.channels import BEC, BSC
from rmpolar.exact import exact_profile
from rmpolar.profile import MC_BEC, Profile
from rmpolar.subsets import rm_row_set

EXACT_CHANNELS = [BEC(0.1), BEC(0.4), BEC(0.5), BEC(0.9), BSC(0.05), BSC(0.11), BSC(0.25), BSC(0.4)]


def test_layer_stats_example():
    st = layer_stats(exact_profile(2, BEC(0.5)))
    assert st.H_max.tolist() == [0.0625, 0.5625, 0.9375]
    assert st.H_min.tolist() == [0.0625, 0.4375, 0.9375]
    assert st.H_avg.tolist() == [0.0625, 0.5, 0.9375]


@pytest.mark.parametrize("ch", EXACT_CHANNELS, ids=lambda c: c.spec)
@pytest.mark.parametrize("m", range(1, 5))
def test_exact_profiles_pass_every_check(m, ch):
    prof = exact_profile(m, ch)
    results = profile_suite(prof)
    results.append(check_layer_separation(prof))
    results.append(check_total_order(prof))
    bad = [r.check for r in results if not r.ok]
    assert not bad


@pytest.mark.parametrize("ch", [BEC(0.4), BSC(0.11), BSC(0.3)], ids=lambda c: c.spec)
@pytest.mark.parametrize("m", range(4))
def test_interlacing_and_strict_gap(m, ch):
    a, b = exact_profile(m, ch), exact_profile(m + 1, ch)
    for r in check_interlacing(a, b):
        assert r.ok, (r.check, r.violations)
    gap = strict_gap_probe(a, b, 0.01)
    assert gap.ok and not gap.vacuous


@pytest.mark.parametrize("m", range(4))
def test_conditioning(m):
    assert check_conditioning(m, BSC(0.15)).ok
    assert check_conditioning(m, BEC(0.4)).ok


def test_degenerate_channels():
    zero = exact_profile(3, BEC(0.0))
    rep = theta_report(zero)
    assert (rep.theta_max, rep.theta_min) == (3, 3) and rep.ordered
    one = exact_profile(3, BEC(1.0))
    rep = theta_report(one)
    assert rep.max_undefined and rep.min_undefined and rep.theta_max == -1
    for p in (zero, one):
        assert all(r.ok for r in check_pointwise(p))


def test_theta_ordering_bsc():
    rep = theta_report(exact_profile(4, BSC(0.11)))
    assert rep.ordered
    assert rep.normalized_spread == rep.spread / 2


def test_twin_code_delta_zero_is_empty():
    spec = twin_select(exact_profile(3, BSC(0.1)), 0.0)
    assert spec.dimension == 0 and spec.nearest_r == -1 and spec.is_rm


@pytest.mark.parametrize("ch", [BSC(0.11), BEC(0.4)], ids=lambda c: c.spec)
def test_separating_deltas_recover_rm(ch):
    prof = exact_profile(4, ch)
    deltas = separating_deltas(prof)
    assert deltas
    for r, d in deltas:
        spec = twin_select(prof, d)
        assert set(spec.selected) == rm_row_set(4, r)
        assert spec.is_rm and spec.nearest_r == r and spec.order_suffix


def test_polarization_fraction():
    prof = exact_profile(2, BEC(0.5))
    assert polarization_fraction(prof, 0.1, 0.1) == 0.5


def test_chain_counts():
    for m in range(6):
        assert check_chain_counts(m).ok
    c = chain_membership_counts(3)
    assert c[0] == 6 and c[0b1] == 2 and c[0b111] == 6


def test_mc_tolerance_absorbs_noise():
    prof = exact_profile(3, BEC(0.4))
    noisy = Profile(3, prof.channel, MC_BEC, prof.H[::-1].copy(), Z=prof.H[::-1].copy(),
                    H_stderr=np.full(8, 0.01), samples=1000)
    assert not check_partial_order(noisy).ok
    # a tiny inversion within 4 sigma is tolerated
    H = prof.H.copy()
    H[1], H[2] = H[2], H[1] + 0.0
    small = Profile(3, prof.channel, MC_BEC, H, Z=H.copy(), H_stderr=np.full(8, 0.5), samples=10)
    assert check_partial_order(small).ok
    assert gap_check(small)[0]


def test_symmetry_bsc():
    for r in check_symmetry(exact_profile(4, BSC(0.2))):
        assert r.ok
