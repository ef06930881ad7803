"""Counter-based random streams keyed by (seed, stream index).

Work is split into fixed-size blocks and block ``b`` always draws from
stream ``b``, so results do not depend on how blocks are scheduled.
"""

from __future__ import annotations

import numpy as np

DEFAULT_BLOCK = 4096


def stream(seed: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def blocks(total: int, block_size: int = DEFAULT_BLOCK):
    """Yield (block index, first item, item count) covering ``total`` items."""
    if block_size < 1:
        raise ValueError("block size must be positive")
    for b, start in enumerate(range(0, total, block_size)):
        yield b, start, min(block_size, total - start)
