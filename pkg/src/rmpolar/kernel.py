"""Backend selection for the erasure-recoverability kernel.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``RMPOLAR_PURE=1`` to force the fallback.

Contract of ``undetermined(rows, masks)``: ``rows`` is a ``(R, W)`` uint64
array of row vectors in decoding order, ``masks`` a ``(S, W)`` array of
unerased-position masks. The result is a ``(S, R)`` uint8 array whose entry
``[s, i]`` is 1 iff row ``i`` restricted to the unerased positions of sample
``s`` lies in the span of the restricted rows ``i + 1, ..., R - 1``.
"""

from __future__ import annotations

import os

import numpy as np

from ._ext import bec_kernel_py

_compiled = None
if os.environ.get("RMPOLAR_PURE", "") not in ("1", "true", "yes"):
    try:
        from ._ext import bec_kernel as _compiled  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        _compiled = None

BACKENDS = {"python": bec_kernel_py.undetermined}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled.undetermined

BACKEND = "compiled" if _compiled is not None else "python"
undetermined = BACKENDS[BACKEND]


def get_backend(name: str | None = None):
    if name is None:
        return undetermined
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None


def words_for(n: int) -> int:
    return max(1, (n + 63) // 64)


def pack_ints(values, n: int) -> np.ndarray:
    """Pack Python-int bit vectors of length ``n`` into ``(len, W)`` uint64."""
    W = words_for(n)
    out = np.zeros((len(values), W), dtype=np.uint64)
    lo = (1 << 64) - 1
    for r, v in enumerate(values):
        for w in range(W):
            out[r, w] = (v >> (64 * w)) & lo
    return out


def pack_bool(bits: np.ndarray) -> np.ndarray:
    """Pack a ``(S, n)`` bool array (bit j = column j) into ``(S, W)`` uint64."""
    bits = np.asarray(bits, dtype=bool)
    S, n = bits.shape
    W = words_for(n)
    padded = np.zeros((S, W * 64), dtype=bool)
    padded[:, :n] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False).reshape(S, W)


def all_masks(n: int) -> np.ndarray:
    """Every length-``n`` mask (n <= 20) as a ``(2**n, 1)`` array; row k is mask k."""
    if n > 20:
        raise ValueError("exhaustive masks limited to n <= 20")
    return np.arange(1 << n, dtype=np.uint64).reshape(-1, 1)
