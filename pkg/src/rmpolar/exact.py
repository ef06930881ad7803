"""Exact bit-channel entropies, Bhattacharyya parameters and MAP errors.

Two engines:

* ``exact_bec_profile`` enumerates all 2^n erasure patterns and counts, per
  erasure weight, the patterns that leave each input undetermined. Values
  are evaluated as exact rationals before rounding to float, so inequality
  checks between entries need no slack.
* ``exact_coset_profile`` handles any finite symmetric channel by splitting
  it into BSC components. For a fixed component pattern the output law given
  that the codeword lies in a coset of a linear subcode depends only on the
  noise-coset mass, so every quantity reduces to sums over cosets:

      H(U_A | Y, U_known) = sum_c (M_c + M_c') h(M_c / (M_c + M_c'))
      Z = 2 sum_c sqrt(M_c M_c'),  P_e = sum_c min(M_c, M_c')

  where c runs over cosets of the subcode spanned by the unknown rows
  other than v_A, c' = c + v_A, and M_c is the noise probability mass of c.
"""

from __future__ import annotations

import itertools
import time
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernel
from .channels import BEC, Channel
from .errors import CapacityError
from .profile import BEC_EXHAUSTIVE, COSET_MIXTURE, Profile
from .subsets import (
    Subset,
    kronecker_masks,
    monomial_row_mask,
    ordered_masks,
    point_set_mask,
    rank_of_mask,
)

MAX_EXACT_M = 4
# component patterns x 2^n x (n + 1) ladder steps
_WORK_BUDGET = 1 << 27


def decode_order(m: int, order: str = "rm") -> tuple[int, ...]:
    if order == "rm":
        return ordered_masks(m)
    if order == "kronecker":
        return kronecker_masks(m)
    raise ValueError(f"unknown decoding order {order!r}")


def _reindex(m: int, masks: Sequence[int], values: np.ndarray) -> np.ndarray:
    """Move values listed in ``masks`` order to total-order rank positions."""
    ranks = rank_of_mask(m)
    out = np.empty(len(masks))
    for mask, v in zip(masks, values):
        out[ranks[mask]] = v
    return out


# ---------------------------------------------------------------- BEC engine

def bec_undetermined_counts(m: int, order: str = "rm") -> np.ndarray:
    """``counts[w, k]``: erasure patterns of weight w leaving row k undetermined.

    Rows are listed in ``decode_order(m, order)``.
    """
    if m > MAX_EXACT_M:
        raise CapacityError(f"exhaustive BEC enumeration supports m <= {MAX_EXACT_M}; use the Monte Carlo engine")
    n = 1 << m
    masks = decode_order(m, order)
    rows = kernel.pack_ints([monomial_row_mask(m, x) for x in masks], n)
    unerased = kernel.all_masks(n)
    ind = kernel.undetermined(rows, unerased)
    erased_weight = n - np.array([bin(k).count("1") for k in range(1 << n)])
    counts = np.zeros((n + 1, n), dtype=np.int64)
    for w in range(n + 1):
        counts[w] = ind[erased_weight == w].sum(axis=0, dtype=np.int64)
    return counts


def _weight_polynomial(counts: np.ndarray, eps: Fraction) -> list[Fraction]:
    n = counts.shape[1]
    weights = [eps ** w * (1 - eps) ** (n - w) for w in range(n + 1)]
    return [sum((int(counts[w, k]) * weights[w] for w in range(n + 1)), Fraction(0)) for k in range(n)]


def exact_bec_profile(m: int, epsilon: float, order: str = "rm") -> Profile:
    """Exact H_A = Z_A over BEC(epsilon) for m <= 4.

    On the BEC the bit-channel posterior is either a point mass or uniform,
    so Z equals H and the MAP error is H / 2.
    """
    t0 = time.perf_counter()
    ch = BEC(epsilon)
    counts = bec_undetermined_counts(m, order)
    exact = _weight_polynomial(counts, Fraction(epsilon))
    masks = decode_order(m, order)
    H = _reindex(m, masks, np.array([float(x) for x in exact]))
    prof = Profile(m, ch, BEC_EXHAUSTIVE, H, Z=H.copy(), Pe=H / 2, order=order)
    prof.meta["exact"] = dict(zip(masks, exact))
    prof.elapsed = time.perf_counter() - t0
    return prof


# -------------------------------------------------------------- coset engine

def coefficient_table(m: int, order_masks: Sequence[int]) -> np.ndarray:
    """``coef[e]``: coordinates of vector e in the monomial basis.

    Bit ``n - 1 - k`` of ``coef[e]`` is the coefficient of the row
    ``order_masks[k]``; the first-decoded row sits in the top bit so that a
    prefix of the decoding order is a contiguous high bit range.
    """
    n = 1 << m
    bitpos = {mask: n - 1 - k for k, mask in enumerate(order_masks)}
    unit = []
    for j in range(n):
        z = point_set_mask(m, j)
        c = 0
        # e_j = sum of v_B over all B containing the point set z(j)
        for b in range(1 << m):
            if b & z == z:
                c |= 1 << bitpos[b]
        unit.append(c)
    coef = np.zeros(1 << n, dtype=np.int64)
    for j, c in enumerate(unit):
        half = 1 << j
        coef[half: 2 * half] = coef[:half] ^ c
    return coef


def _noise_mass(crossovers: Sequence[float]) -> np.ndarray:
    """Q[e] = prod_j (p_j if e_j else 1 - p_j) for all e."""
    q = np.ones(1)
    for p in crossovers:
        q = np.concatenate([q * (1.0 - p), q * p])
    return q


def _pair_entropy(a: np.ndarray, b: np.ndarray) -> float:
    """sum (a + b) h(a / (a + b)) over coset pairs; avoids cancellation near 0."""
    tot = a + b
    keep = (a > 0) & (b > 0)
    a, b, tot = a[keep], b[keep], tot[keep]
    return float(np.sum(-a * np.log2(a / tot) - b * np.log2(b / tot)))


class _CosetEngine:
    """Coset masses for one (m, channel, decoding order)."""

    def __init__(self, m: int, ch: Channel, order: str = "rm"):
        if m > MAX_EXACT_M:
            raise CapacityError(f"coset engine supports m <= {MAX_EXACT_M}")
        self.m, self.ch, self.order = m, ch, order
        self.n = n = 1 << m
        self.masks = decode_order(m, order)
        comps = ch.bsc_components()
        n_patterns = len(comps) ** n
        if n_patterns * (1 << n) * (n + 1) > _WORK_BUDGET:
            raise CapacityError(
                f"coset enumeration too large for m={m} with {len(comps)} channel components"
            )
        self.coef = coefficient_table(m, self.masks)
        self.patterns = []
        for pattern in itertools.product(range(len(comps)), repeat=n):
            prob = 1.0
            for k in pattern:
                prob *= comps[k][0]
            if prob > 0:
                self.patterns.append((prob, _noise_mass([comps[k][1] for k in pattern])))
        self._bitpos = {mask: n - 1 - k for k, mask in enumerate(self.masks)}

    def bit(self, mask: int) -> int:
        return 1 << self._bitpos[mask]

    def _masses(self, q: np.ndarray, known: int) -> np.ndarray:
        return np.bincount(self.coef & known, weights=q, minlength=1 << self.n)

    def conditional(self, target: int, known: int) -> tuple[float, float, float]:
        """(H, Z, P_e) of the target input given Y and the inputs in ``known``.

        ``known`` is a bitmask in coefficient-bit positions (see ``bit``).
        """
        tb = self.bit(target)
        if known & tb:
            raise ValueError("target is already known")
        idx = np.arange(1 << self.n)
        lo = idx[(idx & tb) == 0]
        H = Z = Pe = 0.0
        for prob, q in self.patterns:
            m1 = self._masses(q, known | tb)
            a, b = m1[lo], m1[lo | tb]
            H += prob * _pair_entropy(a, b)
            Z += prob * 2.0 * float(np.sum(np.sqrt(a * b)))
            Pe += prob * float(np.sum(np.minimum(a, b)))
        return min(H, 1.0), min(Z, 1.0), Pe

    def ladder(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """H, Z, P_e for every row in decoding order, conditioning on the past."""
        n = self.n
        H, Z, Pe = np.zeros(n), np.zeros(n), np.zeros(n)
        ids = [self.coef >> (n - t) for t in range(n + 1)]
        for prob, q in self.patterns:
            for t in range(n):
                pairs = np.bincount(ids[t + 1], weights=q, minlength=2 << t).reshape(-1, 2)
                H[t] += prob * _pair_entropy(pairs[:, 0], pairs[:, 1])
                Z[t] += prob * 2.0 * float(np.sum(np.sqrt(pairs[:, 0] * pairs[:, 1])))
                Pe[t] += prob * float(np.sum(pairs.min(axis=1)))
        return np.clip(H, 0.0, 1.0), np.clip(Z, 0.0, 1.0), Pe


def exact_coset_profile(m: int, ch: Channel, order: str = "rm") -> Profile:
    """Exact H_A, Z_A and MAP errors by coset-mixture enumeration (m <= 4)."""
    t0 = time.perf_counter()
    eng = _CosetEngine(m, ch, order)
    H, Z, Pe = eng.ladder()
    masks = eng.masks
    prof = Profile(
        m, ch, COSET_MIXTURE,
        _reindex(m, masks, H), Z=_reindex(m, masks, Z), Pe=_reindex(m, masks, Pe), order=order,
    )
    prof.elapsed = time.perf_counter() - t0
    return prof


def exact_profile(m: int, ch: Channel, order: str = "rm") -> Profile:
    """Dispatch: erasure enumeration for the BEC, coset mixture otherwise."""
    if isinstance(ch, BEC):
        return exact_bec_profile(m, ch.epsilon, order)
    return exact_coset_profile(m, ch, order)


def bec_conditional(m: int, epsilon: float, target: Subset, known: Iterable[Subset]) -> Fraction:
    """Exact P(U_target undetermined | Y, U_known) over BEC(epsilon)."""
    if m > MAX_EXACT_M:
        raise CapacityError(f"exhaustive BEC enumeration supports m <= {MAX_EXACT_M}")
    n = 1 << m
    skip = {b.mask for b in known} | {target.mask}
    others = [x for x in range(1 << m) if x not in skip]
    rows = kernel.pack_ints([monomial_row_mask(m, x) for x in [target.mask] + others], n)
    ind = kernel.undetermined(rows, kernel.all_masks(n))[:, 0]
    erased_weight = n - np.array([bin(k).count("1") for k in range(1 << n)])
    counts = np.bincount(erased_weight[ind == 1], minlength=n + 1)
    eps = Fraction(epsilon)
    return sum((int(c) * eps ** w * (1 - eps) ** (n - w) for w, c in enumerate(counts)), Fraction(0))


def exact_conditional(
    m: int, ch: Channel, target: Subset, known: Iterable[Subset]
) -> tuple[float, float, float]:
    """(H, Z, P_e) of U_target given Y and an arbitrary set of known inputs."""
    known = list(known)
    if any(b.mask == target.mask for b in known):
        raise ValueError("target is already known")
    if isinstance(ch, BEC):
        h = float(bec_conditional(m, ch.epsilon, target, known))
        return h, h, h / 2
    eng = _CosetEngine(m, ch)
    known_bits = 0
    for b in known:
        known_bits |= eng.bit(b.mask)
    return eng.conditional(target.mask, known_bits)


def exact_bit_channel_error(m: int, a: Subset, ch: Channel, order: str = "rm") -> float:
    """MAP error probability of U_A given (Y, U_<A)."""
    prof = exact_profile(m, ch, order)
    return float(prof.Pe[prof.index(a)])
