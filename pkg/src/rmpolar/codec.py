"""Encoding and successive decoding of RM and twin codes.

Inputs are decoded one at a time in the RM total order. Frozen inputs are 0;
an input that is not determined by the outputs and the earlier decisions is
set to 0 and flagged as guessed, which counts as a decoding failure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from . import kernel
from .analysis import TwinCodeSpec
from .channels import BEC, ERASURE, Channel
from .errors import CapacityError
from .exact import MAX_EXACT_M, coefficient_table
from .gf2 import parity
from .montecarlo import erasure_block, rm_rows, run_blocks
from .profile import Profile
from .subsets import Subset, monomial_row_mask, ordered_masks, rank_of_mask, rm_row_set


class BitFlag(enum.Enum):
    DETERMINED = "determined"
    GUESSED = "guessed"


@dataclass(frozen=True)
class CodeSpec:
    """Information set over [m]; everything else is frozen to 0."""

    m: int
    information: frozenset
    name: str = ""

    def __post_init__(self):
        info = frozenset(self.information)
        for a in info:
            if not isinstance(a, Subset) or a.m != self.m:
                raise ValueError("information set must hold subsets of [m]")
        object.__setattr__(self, "information", info)

    @property
    def n(self) -> int:
        return 1 << self.m

    @property
    def k(self) -> int:
        return len(self.information)

    @property
    def frozen(self) -> frozenset:
        return frozenset(Subset(self.m, x) for x in range(self.n)) - self.information

    @property
    def info_ranks(self) -> list[int]:
        """Total-order ranks of the information inputs, ascending."""
        ranks = rank_of_mask(self.m)
        return sorted(ranks[a.mask] for a in self.information)

    def info_subsets(self) -> list[Subset]:
        masks = ordered_masks(self.m)
        return [Subset(self.m, masks[t]) for t in self.info_ranks]

    def generator_rows(self) -> list[int]:
        return [monomial_row_mask(self.m, a.mask) for a in self.info_subsets()]

    def generator_array(self) -> np.ndarray:
        """``(k, n)`` uint8 generator, rows in decoding order."""
        rows = self.generator_rows()
        out = np.zeros((len(rows), self.n), dtype=np.uint8)
        for i, r in enumerate(rows):
            out[i] = [(r >> j) & 1 for j in range(self.n)]
        return out


def rm_code(m: int, r: int) -> CodeSpec:
    return CodeSpec(m, frozenset(rm_row_set(m, r)), name=f"RM({m},{r})")


def twin_code(spec: TwinCodeSpec) -> CodeSpec:
    return CodeSpec(spec.m, frozenset(spec.selected), name=f"twin({spec.m},{spec.delta_n:.3g})")


def encode(code: CodeSpec, message) -> np.ndarray:
    """Codeword bits (column order) for message bits listed in decoding order."""
    msg = np.asarray(list(message), dtype=np.uint8)
    if msg.shape != (code.k,):
        raise ValueError(f"message needs {code.k} bits, got {msg.size}")
    word = 0
    for bit, row in zip(msg, code.generator_rows()):
        if bit & 1:
            word ^= row
    return np.array([(word >> j) & 1 for j in range(code.n)], dtype=np.uint8)


def encode_many(code: CodeSpec, messages: np.ndarray) -> np.ndarray:
    """Vectorised ``encode`` over a ``(frames, k)`` array."""
    if code.k == 0:
        return np.zeros((len(messages), code.n), dtype=np.uint8)
    return (messages.astype(np.int64) @ code.generator_array().astype(np.int64) % 2).astype(np.uint8)


@dataclass
class DecodeResult:
    message: np.ndarray
    flags: list
    u: np.ndarray
    success: bool | None = None
    # erasure decoding counts a guessed input as a failure even if the
    # guess happens to be right; MAP tie-breaks are ordinary decisions
    guess_fails: bool = True

    @property
    def guessed(self) -> int:
        return sum(1 for f in self.flags if f is BitFlag.GUESSED)

    def check(self, sent) -> "DecodeResult":
        """Set ``success`` against the transmitted message."""
        sent = np.asarray(list(sent), dtype=np.uint8)
        self.success = bool(np.array_equal(sent, self.message)) and not (self.guess_fails and self.guessed)
        return self


@lru_cache(maxsize=32)
def _column_equations(m: int) -> tuple[int, ...]:
    """Column j as an int over total-order ranks: bit t set iff row t has a 1 at j."""
    n = 1 << m
    rows = [monomial_row_mask(m, x) for x in ordered_masks(m)]
    return tuple(sum(((rows[t] >> j) & 1) << t for t in range(n)) for j in range(n))


def sc_decode_bec(code: CodeSpec, received) -> DecodeResult:
    """Successive decoding on the BEC (``ERASURE`` marks an erased position).

    Each unerased position gives one linear equation in the inputs. After
    elimination with the latest-decoded input as pivot, input t is
    determined iff some equation involves t and only earlier inputs.
    """
    y = np.asarray(received)
    if y.shape != (code.n,):
        raise ValueError(f"received word must have length {code.n}")
    cols = _column_equations(code.m)
    basis: dict[int, tuple[int, int]] = {}
    for j in np.flatnonzero(y != ERASURE):
        v, b = cols[j], int(y[j])
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = (v, b)
                break
            pv, pb = basis[top]
            v ^= pv
            b ^= pb
    info = set(code.info_ranks)
    u = np.zeros(code.n, dtype=np.uint8)
    decided = 0
    flags = []
    for t in range(code.n):
        if t not in info:
            continue
        if t in basis:
            v, b = basis[t]
            val = b ^ parity(v & decided & ((1 << t) - 1))
            flags.append(BitFlag.DETERMINED)
        else:
            val = 0
            flags.append(BitFlag.GUESSED)
        u[t] = val
        decided |= val << t
    return DecodeResult(u[code.info_ranks], flags, u)


@lru_cache(maxsize=16)
def _coef(m: int) -> np.ndarray:
    return coefficient_table(m, ordered_masks(m))


def input_posterior(m: int, received, ch: Channel) -> np.ndarray:
    """P(y | u) for every input vector u (rank 0 in the top bit)."""
    if m > MAX_EXACT_M:
        raise CapacityError(f"MAP successive decoding supports m <= {MAX_EXACT_M}")
    table = np.asarray(ch.outputs, dtype=float)
    lik = np.ones(1)
    for yj in np.asarray(received):
        row = table[int(yj)]
        lik = np.concatenate([lik * row[0], lik * row[1]])
    post = np.empty_like(lik)
    post[_coef(m)] = lik
    return post


_TIE_RTOL = 1e-12


def _is_tie(p0: float, p1: float) -> bool:
    # symmetric outputs make exact ties common; summation order must not break them
    return abs(p1 - p0) <= _TIE_RTOL * (p0 + p1)


def sc_decode_map(code: CodeSpec, received, ch: Channel) -> DecodeResult:
    """Per-input MAP successive decoding (m <= 4); ties go to 0."""
    post = input_posterior(code.m, received, ch)
    n = code.n
    info = set(code.info_ranks)
    u = np.zeros(n, dtype=np.uint8)
    flags = []
    block = post
    for t in range(n):
        half = len(block) // 2
        if t in info:
            p0, p1 = block[:half].sum(), block[half:].sum()
            tie = _is_tie(p0, p1)
            val = 0 if tie or p0 > p1 else 1
            flags.append(BitFlag.GUESSED if tie else BitFlag.DETERMINED)
        else:
            val = 0
        u[t] = val
        block = block[half:] if val else block[:half]
    return DecodeResult(u[code.info_ranks], flags, u, guess_fails=False)


# ----------------------------------------------------------- simulation

@dataclass
class SimResult:
    code: str
    channel: str
    frames: int
    seed: int
    errors: int
    first_error: dict = field(default_factory=dict)
    genie_errors: dict = field(default_factory=dict)
    union_bound: float = math.nan
    union_sigma: float = 0.0

    @property
    def bler(self) -> float:
        return self.errors / self.frames

    @property
    def bler_sigma(self) -> float:
        p = self.bler
        if p in (0.0, 1.0):
            return 3.0 / self.frames
        return math.sqrt(p * (1 - p) / self.frames)

    def to_record(self) -> dict:
        return {
            "code": self.code,
            "channel": self.channel,
            "frames": self.frames,
            "seed": self.seed,
            "bler": self.bler,
            "bler_stderr": self.bler_sigma,
            "errors": self.errors,
            "union_bound": self.union_bound,
            "union_bound_stderr": self.union_sigma,
            "first_error": [{"subset": k, "count": v} for k, v in self.first_error.items()],
            "genie_errors": [{"subset": k, "count": v} for k, v in self.genie_errors.items()],
        }


def union_bound(code: CodeSpec, profile: Profile) -> tuple[float, float]:
    """(sum of Z_A over the information set, its standard error)."""
    if profile.Z is None:
        raise ValueError("union bound needs Bhattacharyya parameters")
    if profile.m != code.m:
        raise ValueError("profile and code have different m")
    idx = code.info_ranks
    zs = np.asarray(profile.Z)[idx]
    se = np.asarray(profile.Z_stderr)[idx] if profile.Z_stderr is not None else np.zeros(len(idx))
    return math.fsum(zs.tolist()), math.sqrt(float(np.sum(se ** 2)))


def block_error_sim(
    code: CodeSpec,
    ch: Channel,
    frames: int,
    seed: int = 0,
    profile: Profile | None = None,
    threads: int | None = None,
) -> SimResult:
    """Empirical block error rate with first-error and genie-aided histograms."""
    if profile is None:
        raise ValueError("block_error_sim needs a profile with Z values for the union bound")
    ub, ub_se = union_bound(code, profile)
    info = code.info_ranks
    masks = ordered_masks(code.m)
    labels = [Subset(code.m, masks[t]).to_hex() for t in info]
    n = code.n

    if isinstance(ch, BEC):
        rows = rm_rows(code.m)

        def work(b, count, gen):
            erased = erasure_block(n, ch.epsilon, count, gen)
            ind = kernel.undetermined(rows, kernel.pack_bool(~erased))[:, info].astype(bool)
            return _tally(ind, ind)
    else:
        if code.m > MAX_EXACT_M:
            raise CapacityError(f"non-erasure simulation supports m <= {MAX_EXACT_M}")
        def work(b, count, gen):
            msgs = gen.integers(0, 2, size=(count, code.k), dtype=np.uint8)
            words = encode_many(code, msgs)
            ys = ch.sample_outputs(words, gen)
            wrong = np.zeros((count, len(info)), dtype=bool)
            genie = np.zeros((count, len(info)), dtype=bool)
            for f in range(count):
                sent = np.zeros(n, dtype=np.uint8)
                sent[info] = msgs[f]
                res = sc_decode_map(code, ys[f], ch)
                wrong[f] = res.u[info] != msgs[f]
                genie[f] = _genie_errors(code, ys[f], ch, sent)
            return _tally(wrong, genie)

    parts = run_blocks(frames, seed, work, threads)
    errors = sum(p[0] for p in parts)
    first = np.sum([p[1] for p in parts], axis=0) if info else []
    gen_hist = np.sum([p[2] for p in parts], axis=0) if info else []
    return SimResult(
        code.name or f"code({code.m},{code.k})", ch.spec, frames, seed, int(errors),
        {lab: int(c) for lab, c in zip(labels, first)},
        {lab: int(c) for lab, c in zip(labels, gen_hist)},
        ub, ub_se,
    )


def _tally(wrong: np.ndarray, genie: np.ndarray):
    """(failed frames, first-error counts, genie-aided error counts)."""
    k = wrong.shape[1]
    failed = wrong.any(axis=1)
    first = np.zeros(k, dtype=np.int64)
    if k:
        np.add.at(first, np.argmax(wrong[failed], axis=1), 1)
    return int(failed.sum()), first, genie.sum(axis=0, dtype=np.int64)


def _genie_errors(code: CodeSpec, received, ch: Channel, sent_u: np.ndarray) -> np.ndarray:
    """Per information input: MAP decision wrong given the true past."""
    post = input_posterior(code.m, received, ch)
    info = set(code.info_ranks)
    out = []
    block = post
    for t in range(code.n):
        half = len(block) // 2
        if t in info:
            p0, p1 = block[:half].sum(), block[half:].sum()
            guess = 0 if _is_tie(p0, p1) or p0 > p1 else 1
            out.append(guess != sent_u[t])
        block = block[half:] if sent_u[t] else block[:half]
    return np.array(out, dtype=bool)


# --------------------------------------------------- syndrome source coding

def dual_order(m: int, r: int) -> int:
    if not 0 <= r <= m - 1:
        raise ValueError(f"need 0 <= r <= m - 1, got r={r}, m={m}")
    return m - r - 1


def parity_check_rows(m: int, r: int) -> list[int]:
    """Rows of the generator of RM(m, m - r - 1), in decoding order."""
    s = dual_order(m, r)
    return [monomial_row_mask(m, x) for x in ordered_masks(m) if bin(x).count("1") <= s]


def syndrome_compress(m: int, r: int, source) -> np.ndarray:
    """source * H^T with H the generator of the dual code RM(m, m - r - 1)."""
    bits = np.asarray(list(source), dtype=np.uint8)
    if bits.shape != (1 << m,):
        raise ValueError(f"source must have length {1 << m}")
    word = sum(int(b) << j for j, b in enumerate(bits))
    return np.array([parity(word & h) for h in parity_check_rows(m, r)], dtype=np.uint8)


@lru_cache(maxsize=16)
def _leader_table(m: int, r: int, prefer: str) -> np.ndarray:
    """Source index chosen for every syndrome value (as an integer)."""
    if m > MAX_EXACT_M:
        raise CapacityError(f"MAP decompression supports m <= {MAX_EXACT_M}")
    n = 1 << m
    H = parity_check_rows(m, r)
    # syndrome bit i of unit vector e_j
    unit = [sum(((h >> j) & 1) << i for i, h in enumerate(H)) for j in range(n)]
    syn = np.zeros(1 << n, dtype=np.int64)
    for j, c in enumerate(unit):
        syn[1 << j: 2 << j] = syn[: 1 << j] ^ c
    weight = np.array([bin(x).count("1") for x in range(1 << n)])
    if prefer == "light":
        key = weight
    elif prefer == "heavy":
        key = -weight
    else:
        key = np.zeros_like(weight)
    order = np.lexsort((np.arange(1 << n), key, syn))
    first = np.ones(len(order), dtype=bool)
    first[1:] = syn[order[1:]] != syn[order[:-1]]
    table = np.full(1 << len(H), -1, dtype=np.int64)
    table[syn[order[first]]] = order[first]
    return table


def syndrome_decompress(m: int, r: int, syndrome, p: float) -> np.ndarray:
    """MAP source sequence with the given syndrome under a Bernoulli(p) prior."""
    s = np.asarray(list(syndrome), dtype=np.uint8)
    H = parity_check_rows(m, r)
    if s.shape != (len(H),):
        raise ValueError(f"syndrome must have length {len(H)}")
    prefer = "light" if p < 0.5 else ("heavy" if p > 0.5 else "any")
    idx = int(_leader_table(m, r, prefer)[sum(int(b) << i for i, b in enumerate(s))])
    return np.array([(idx >> j) & 1 for j in range(1 << m)], dtype=np.uint8)


def compression_rate(m: int, r: int) -> float:
    return len(parity_check_rows(m, r)) / (1 << m)


def _bernoulli(p: Fraction, n: int, w: int) -> Fraction:
    return p ** w * (1 - p) ** (n - w)


def compression_failure_probability(m: int, r: int, p) -> Fraction:
    """Exact P(decompress(compress(S)) != S) by enumerating every source."""
    p = Fraction(str(p)) if isinstance(p, float) else Fraction(p)
    n = 1 << m
    fail = Fraction(0)
    for x in range(1 << n):
        bits = [(x >> j) & 1 for j in range(n)]
        back = syndrome_decompress(m, r, syndrome_compress(m, r, bits), float(p))
        if list(back) != bits:
            fail += _bernoulli(p, n, sum(bits))
    return fail


def block_map_error_probability(m: int, r: int, p) -> Fraction:
    """Exact block MAP error of RM(m, r) on BSC(p), uniform messages."""
    p = Fraction(str(p)) if isinstance(p, float) else Fraction(p)
    n = 1 << m
    code = rm_code(m, r)
    words = []
    for x in range(1 << code.k):
        w = 0
        for i, row in enumerate(code.generator_rows()):
            if x >> i & 1:
                w ^= row
        words.append(w)
    correct = Fraction(0)
    for y in range(1 << n):
        correct += max(_bernoulli(p, n, bin(y ^ c).count("1")) for c in words)
    return 1 - correct / len(words)

