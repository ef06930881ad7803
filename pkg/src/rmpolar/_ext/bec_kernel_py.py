"""Pure numpy fallback for the erasure-recoverability kernel.

Vectorised across samples: each sample keeps its own echelon basis indexed
by leading bit, and the reduction walks bits from the top down.
"""

from __future__ import annotations

import numpy as np


def undetermined(rows: np.ndarray, masks: np.ndarray) -> np.ndarray:
    rows = np.ascontiguousarray(rows, dtype=np.uint64)
    masks = np.ascontiguousarray(masks, dtype=np.uint64)
    R, W = rows.shape
    S = masks.shape[0]
    if masks.shape[1] != W:
        raise ValueError("rows and masks have different word counts")
    out = np.zeros((S, R), dtype=np.uint8)
    if R == 0 or W == 0 or S == 0:
        return out
    nbits = W * 64
    basis = np.zeros((nbits, S, W), dtype=np.uint64)
    have = np.zeros((nbits, S), dtype=bool)
    one = np.uint64(1)
    for i in range(R - 1, -1, -1):
        row = rows[i]
        v = masks & row
        pending = np.ones(S, dtype=bool)
        nz = np.flatnonzero(row)
        if len(nz) == 0:
            out[:, i] = 1
            continue
        top_word = int(nz[-1])
        top = top_word * 64 + int(row[top_word]).bit_length() - 1
        # bits above the row's top bit can never appear in v
        for b in range(top, -1, -1):
            w, k = divmod(b, 64)
            hit = pending & ((v[:, w] >> np.uint64(k)) & one).astype(bool)
            if not hit.any():
                continue
            hb = have[b]
            red = hit & hb
            if red.any():
                v[red] ^= basis[b, red]
            ins = hit & ~hb
            if ins.any():
                basis[b, ins] = v[ins]
                have[b, ins] = True
                pending &= ~ins
        out[:, i] = pending
    return out
