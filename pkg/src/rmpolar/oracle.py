"""Brute-force reference: the full joint law of (U, Y) with no coset reduction.

Only for cross-checking the exact engines at m <= 3. Every message u and
every output sequence y is tabulated explicitly, and bit-channel quantities
come straight from the joint marginals:

    H(U_A | Y, U_<A) = H(Y, U_<=A) - H(Y, U_<A)
"""

from __future__ import annotations

import numpy as np

from .channels import Channel
from .errors import CapacityError
from .exact import _reindex, decode_order
from .profile import NAIVE_JOINT, Profile
from .subsets import monomial_row_mask

MAX_ORACLE_M = 3


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def joint_table(m: int, ch: Channel, order: str = "rm") -> np.ndarray:
    """``P[u, y]`` for every message index u and output sequence index y.

    Bit ``n - 1 - k`` of u is the input on the k-th row of the decoding
    order; y enumerates output sequences in base |Y| (position 0 most
    significant). Output sequences of probability zero are dropped.
    """
    if m > MAX_ORACLE_M:
        raise CapacityError(f"naive oracle supports m <= {MAX_ORACLE_M}")
    n = 1 << m
    rows = [monomial_row_mask(m, x) for x in decode_order(m, order)]
    table = np.asarray(ch.outputs, dtype=float)
    k = len(table)
    codewords = np.zeros(1 << n, dtype=np.int64)
    for u in range(1 << n):
        x = 0
        for pos, row in enumerate(rows):
            if u >> (n - 1 - pos) & 1:
                x ^= row
        codewords[u] = x
    xbits = (codewords[:, None] >> np.arange(n)) & 1          # (2^n, n)
    digits = (np.arange(k ** n)[:, None] // k ** np.arange(n - 1, -1, -1)) % k  # (k^n, n)
    P = np.full((1 << n, k ** n), 0.5 ** n)
    for j in range(n):
        P *= table[digits[:, j][None, :], xbits[:, j][:, None]]
    return P[:, P.sum(axis=0) > 0]


def naive_profile(m: int, ch: Channel, order: str = "rm") -> Profile:
    P = joint_table(m, ch, order)
    n = 1 << m
    H, Z, Pe = np.zeros(n), np.zeros(n), np.zeros(n)
    prefix = [_entropy(P.reshape(1 << t, -1, P.shape[1]).sum(axis=1)) for t in range(n + 1)]
    for t in range(n):
        pairs = P.reshape(1 << t, 2, -1, P.shape[1]).sum(axis=2)
        a, b = pairs[:, 0], pairs[:, 1]
        H[t] = prefix[t + 1] - prefix[t]
        Z[t] = 2.0 * float(np.sum(np.sqrt(a * b)))
        Pe[t] = float(np.sum(np.minimum(a, b)))
    masks = decode_order(m, order)
    return Profile(
        m, ch, NAIVE_JOINT,
        _reindex(m, masks, H), Z=_reindex(m, masks, Z), Pe=_reindex(m, masks, Pe), order=order,
    )
