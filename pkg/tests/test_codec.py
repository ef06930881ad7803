import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rmpolar.analysis import twin_select
from rmpolar.channels import BEC, BSC, ERASURE
from rmpolar.codec import (
    BitFlag,
    CodeSpec,
    block_error_sim,
    block_map_error_probability,
    compression_failure_probability,
    compression_rate,
    encode,
    encode_many,
    input_posterior,
    parity_check_rows,
    rm_code,
    sc_decode_bec,
    sc_decode_map,
    syndrome_compress,
    syndrome_decompress,
    twin_code,
    union_bound,
)
from rmpolar.exact import exact_profile
from rmpolar.montecarlo import mc_bec_profile
from rmpolar.subsets import generator_matrix, ordered_masks


def all_messages(k):
    return [np.array(b, dtype=np.uint8) for b in itertools.product((0, 1), repeat=k)]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5).flatmap(lambda m: st.tuples(
    st.just(m), st.integers(0, m), st.integers(0, 2**32 - 1))))
def test_encode_linear(args):
    m, r, seed = args
    code = rm_code(m, r)
    rng = np.random.default_rng(seed)
    a, b = rng.integers(0, 2, (2, code.k), dtype=np.uint8)
    assert np.array_equal(encode(code, a ^ b), encode(code, a) ^ encode(code, b))
    assert np.array_equal(encode_many(code, np.stack([a, b])), np.stack([encode(code, a), encode(code, b)]))


def test_rm31_weights():
    code = rm_code(3, 1)
    weights = {int(encode(code, msg).sum()) for msg in all_messages(code.k)}
    assert weights == {0, 4, 8}
    assert code.k == 4 and code.n == 8


def test_encode_rejects_wrong_length():
    with pytest.raises(ValueError):
        encode(rm_code(2, 1), [1, 0])


@pytest.mark.parametrize("m", range(4))
def test_noiseless_decoding(m):
    for r in range(m + 1):
        code = rm_code(m, r)
        for msg in all_messages(code.k):
            x = encode(code, msg)
            res = sc_decode_bec(code, x).check(msg)
            assert res.success and res.guessed == 0
            assert sc_decode_map(code, x, BSC(0.0)).check(msg).success


def ml_recoverable(code, keep):
    """Erasure ML succeeds iff the restricted generator has rank k."""
    from rmpolar import gf2
    rows = [row & keep for row in code.generator_rows()]
    return gf2.rank(rows, code.n) == code.k


@pytest.mark.parametrize("m,r", [(2, 1), (3, 1), (3, 2)])
def test_erasure_sc_against_ml(m, r):
    code = rm_code(m, r)
    n = code.n
    rng = np.random.default_rng(m * 10 + r)
    decodable = 0
    for keep in range(1 << n):
        msg = rng.integers(0, 2, code.k, dtype=np.uint8)
        y = encode(code, msg).astype(np.int64)
        y[[j for j in range(n) if not keep >> j & 1]] = ERASURE
        res = sc_decode_bec(code, y).check(msg)
        if res.success:
            decodable += 1
            assert ml_recoverable(code, keep)
        else:
            assert res.guessed > 0
        assert all(f in (BitFlag.DETERMINED, BitFlag.GUESSED) for f in res.flags)
    if (m, r) == (2, 1):
        assert decodable == 5  # no erasure, or a single one


def brute_sc(code, y, ch):
    """Per-input MAP with earlier inputs fixed and later ones (frozen or not) free."""
    n = code.n
    G = generator_matrix(code.m).rows
    info = set(code.info_ranks)
    table = np.asarray(ch.outputs)
    lik = {}
    for u in range(1 << n):
        word = 0
        for t in range(n):
            if u >> t & 1:
                word ^= G[t]
        lik[u] = float(np.prod([table[y[j]][(word >> j) & 1] for j in range(n)]))
    decided = 0
    out = []
    for t in range(n):
        if t not in info:
            continue
        prefix = (1 << t) - 1
        p = [0.0, 0.0]
        for u, l in lik.items():
            if u & prefix == decided:
                p[u >> t & 1] += l
        # exact ties are common on the BSC; they go to 0
        bit = 1 if p[1] - p[0] > 1e-12 * (p[0] + p[1]) else 0
        out.append(bit)
        decided |= bit << t
    return out


@pytest.mark.parametrize("r", [1, 2])
def test_map_sc_matches_brute_force(r):
    code = rm_code(3, r)
    ch = BSC(0.15)
    rng = np.random.default_rng(r)
    for _ in range(25):
        msg = rng.integers(0, 2, code.k, dtype=np.uint8)
        y = ch.sample_outputs(encode(code, msg), rng)
        assert sc_decode_map(code, y, ch).message.tolist() == brute_sc(code, y, ch)


def test_input_posterior_is_a_distribution():
    ch = BSC(0.2)
    y = np.array([0, 1, 1, 0])
    post = input_posterior(2, y, ch)
    assert post.sum() == pytest.approx(1.0)  # sum over u of P(y | u) = sum over x of P(y | x)


def test_bler_monotone_in_erasure_rate():
    code = rm_code(5, 3)
    lo = block_error_sim(code, BEC(0.03), 20_000, seed=1, profile=mc_bec_profile(5, 0.03, 20_000))
    hi = block_error_sim(code, BEC(0.08), 20_000, seed=1, profile=mc_bec_profile(5, 0.08, 20_000))
    assert 0 < lo.bler < hi.bler
    assert lo.bler_sigma + hi.bler_sigma < hi.bler - lo.bler


def test_bec_bler_below_union_bound():
    code = rm_code(3, 1)
    prof = exact_profile(3, BEC(0.3))
    sim = block_error_sim(code, BEC(0.3), 20_000, seed=4, profile=prof)
    ub, _ = union_bound(code, prof)
    assert sim.bler <= ub + 4 * sim.bler_sigma
    assert sum(sim.first_error.values()) == sim.errors


def test_map_genie_errors_match_bit_channel_error():
    code = rm_code(3, 2)
    ch = BSC(0.08)
    prof = exact_profile(3, ch)
    frames = 4000
    sim = block_error_sim(code, ch, frames, seed=3, profile=prof)
    masks = ordered_masks(3)
    for t in code.info_ranks:
        from rmpolar.subsets import Subset
        label = Subset(3, masks[t]).to_hex()
        pe = prof.Pe[t]
        sigma = np.sqrt(pe * (1 - pe) / frames) + 3 / frames
        assert abs(sim.genie_errors[label] / frames - pe) < 4.5 * sigma


def test_sim_requires_profile():
    with pytest.raises(ValueError):
        block_error_sim(rm_code(2, 1), BEC(0.2), 10)


def test_twin_code_from_profile():
    prof = exact_profile(3, BEC(0.2))
    code = twin_code(twin_select(prof, 0.05))
    assert isinstance(code, CodeSpec)
    assert all(prof.Z[t] < 0.05 for t in code.info_ranks)


def test_syndrome_shapes():
    for m in range(1, 5):
        assert len(parity_check_rows(m, m - 1)) == 1
        assert compression_rate(m, m - 1) == 1 / (1 << m)
    with pytest.raises(ValueError):
        parity_check_rows(3, 3)


def test_syndrome_roundtrip_light_source():
    m, r = 3, 1
    src = np.zeros(8, dtype=np.uint8)
    src[5] = 1
    s = syndrome_compress(m, r, src)
    assert len(s) == 4
    assert np.array_equal(syndrome_decompress(m, r, s, 0.05), src)


@pytest.mark.parametrize("m,r,p", [(2, 0, Fraction(1, 10)), (3, 1, Fraction(1, 20)), (3, 2, Fraction(1, 8))])
def test_source_channel_duality(m, r, p):
    assert compression_failure_probability(m, r, p) == block_map_error_probability(m, r, p)
