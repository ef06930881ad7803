import random

import numpy as np
import pytest

from rmpolar import kernel
from rmpolar.analysis import check_chain_monotone, check_sum_rule
from rmpolar.errors import CapacityError
from rmpolar.exact import exact_bec_profile
from rmpolar.montecarlo import (
    aggregate_stderr,
    bernoulli_stderr,
    mc_bec_counts,
    mc_bec_profile,
    mc_chain_trace,
)
from rmpolar.subsets import Subset, canonical_chains, chain_from_permutation


@pytest.fixture(scope="module")
def prof8():
    return mc_bec_profile(8, 0.4, samples=20_000, seed=5)


def test_extreme_erasure_rates():
    assert np.all(mc_bec_profile(5, 0.0, samples=500).H == 0.0)
    assert np.all(mc_bec_profile(5, 1.0, samples=500).H == 1.0)


def test_stderr_rule_of_three():
    se = bernoulli_stderr(np.array([0.0, 0.25, 1.0]), 100)
    assert se[0] == se[2] == 0.03
    assert se[1] == pytest.approx(np.sqrt(0.25 * 0.75 / 100))


def test_deterministic_across_threads_and_blocks():
    a = mc_bec_counts(6, 0.4, 10_000, seed=9, threads=1)
    b = mc_bec_counts(6, 0.4, 10_000, seed=9, threads=4)
    c = mc_bec_counts(6, 0.4, 10_000, seed=10, threads=1)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_backends_give_identical_counts():
    runs = [mc_bec_counts(4, 0.4, 3000, seed=1, backend=name) for name in kernel.BACKENDS]
    for r in runs[1:]:
        assert np.array_equal(r, runs[0])


def test_matches_exact_at_m4():
    exact = exact_bec_profile(4, 0.4)
    mc = mc_bec_profile(4, 0.4, samples=200_000, seed=2)
    z = np.abs(mc.H - exact.H) / np.maximum(mc.H_stderr, 1e-12)
    assert z.max() < 4.5


def test_sum_rule(prof8):
    assert check_sum_rule(prof8).ok
    assert aggregate_stderr(prof8) > 0


def test_random_chains_monotone(prof8):
    rnd = random.Random(8)
    chains = list(canonical_chains(8))
    for _ in range(50):
        perm = list(range(1, 9))
        rnd.shuffle(perm)
        chains.append(chain_from_permutation(perm))
    for c in chains:
        res = check_chain_monotone(prof8, c)
        assert res.ok, res.violations


def test_chain_trace(prof8):
    chain = canonical_chains(8)[0]
    trace = mc_chain_trace(8, 0.4, chain, profile=prof8)
    assert len(trace) == 9
    assert trace[0][0] == prof8.h(Subset(8, 0))


def test_limits():
    with pytest.raises(CapacityError):
        mc_bec_counts(13, 0.4, 10)
    with pytest.raises(ValueError):
        mc_bec_counts(3, 0.4, 0)
    with pytest.raises(ValueError):
        mc_bec_counts(3, 1.4, 10)
