"""Seeded Monte Carlo estimation of the RM bit-channel entropies on the BEC.

Each sample draws an erasure pattern and one pass of the kernel decides,
for every row, whether U_A is determined by the unerased outputs and the
rows decoded before it. On the BEC the bit-channel posterior is a point
mass or uniform, so the undetermined fraction is an unbiased estimate of
H_A (and of Z_A).

Samples are cut into fixed blocks; block b draws from stream (seed, b) and
per-block counts are merged in block order, so the output does not depend
on the number of worker threads.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from . import kernel, rng
from .channels import BEC
from .errors import CapacityError
from .profile import MC_BEC, Profile
from .subsets import Chain, monomial_row_mask, ordered_masks

MAX_MC_M = 12
DEFAULT_SAMPLES = 100_000


def default_threads() -> int:
    return max(1, min(8, os.cpu_count() or 1))


def erasure_block(n: int, epsilon: float, count: int, gen: np.random.Generator) -> np.ndarray:
    """``(count, n)`` bool array, True where the position is erased."""
    return gen.random((count, n)) < epsilon


def run_blocks(
    n_items: int,
    seed: int,
    work: Callable[[int, int, np.random.Generator], object],
    threads: int | None = None,
    block_size: int = rng.DEFAULT_BLOCK,
    progress: Callable[[int, int], None] | None = None,
) -> list:
    """Apply ``work(block, count, generator)`` to every block; results in block order."""
    specs = list(rng.blocks(n_items, block_size))
    threads = threads or default_threads()

    def one(spec):
        b, _, count = spec
        return work(b, count, rng.stream(seed, b))

    if threads == 1 or len(specs) <= 1:
        out = []
        for i, spec in enumerate(specs):
            out.append(one(spec))
            if progress:
                progress(i + 1, len(specs))
        return out
    with ThreadPoolExecutor(max_workers=threads) as pool:
        out = []
        for i, res in enumerate(pool.map(one, specs)):
            out.append(res)
            if progress:
                progress(i + 1, len(specs))
        return out


def rm_rows(m: int, masks=None) -> np.ndarray:
    """Packed monomial rows in RM decoding order (or the given mask order)."""
    masks = ordered_masks(m) if masks is None else masks
    return kernel.pack_ints([monomial_row_mask(m, x) for x in masks], 1 << m)


def bernoulli_stderr(h: np.ndarray, samples: int) -> np.ndarray:
    """sqrt(h(1-h)/N), replaced by the rule-of-three bound 3/N at h in {0, 1}."""
    h = np.asarray(h, dtype=float)
    se = np.sqrt(h * (1.0 - h) / samples)
    return np.where((h == 0.0) | (h == 1.0), 3.0 / samples, se)


def mc_bec_counts(
    m: int,
    epsilon: float,
    samples: int,
    seed: int = 0,
    threads: int | None = None,
    backend: str | None = None,
    block_size: int = rng.DEFAULT_BLOCK,
    progress: Callable[[int, int], None] | None = None,
) -> np.ndarray:
    """Undetermined counts per row, rows in RM decoding order."""
    if not 0 <= m <= MAX_MC_M:
        raise CapacityError(f"Monte Carlo engine supports m <= {MAX_MC_M}")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    BEC(epsilon)  # validates epsilon
    n = 1 << m
    rows = rm_rows(m)
    undetermined = kernel.get_backend(backend)

    def work(b, count, gen):
        erased = erasure_block(n, epsilon, count, gen)
        ind = undetermined(rows, kernel.pack_bool(~erased))
        return ind.sum(axis=0, dtype=np.int64)

    parts = run_blocks(samples, seed, work, threads, block_size, progress)
    return np.sum(parts, axis=0, dtype=np.int64)


def mc_bec_profile(
    m: int,
    epsilon: float,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    threads: int | None = None,
    backend: str | None = None,
    block_size: int = rng.DEFAULT_BLOCK,
    progress: Callable[[int, int], None] | None = None,
) -> Profile:
    """Estimated H_A (= Z_A) for all A, with Bernoulli standard errors."""
    t0 = time.perf_counter()
    counts = mc_bec_counts(m, epsilon, samples, seed, threads, backend, block_size, progress)
    H = counts / samples
    se = bernoulli_stderr(H, samples)
    prof = Profile(
        m, BEC(epsilon), MC_BEC, H, Z=H.copy(), Pe=H / 2,
        H_stderr=se, Z_stderr=se.copy(), samples=samples, seed=seed,
    )
    prof.meta["counts"] = counts
    prof.elapsed = time.perf_counter() - t0
    return prof


def mc_chain_trace(
    m: int,
    epsilon: float,
    chain: Chain,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    profile: Profile | None = None,
    **kwargs,
) -> list[tuple[float, float]]:
    """(H_hat, stderr) along ``chain`` (length m + 1), from a full profile run."""
    if chain.m != m:
        raise ValueError("chain is over a different m")
    if profile is None:
        profile = mc_bec_profile(m, epsilon, samples, seed, **kwargs)
    return [(profile.h(a), profile.sigma(a)) for a in chain.sets]


def aggregate_stderr(profile: Profile) -> float:
    """Standard error of sum_A H_hat, ignoring correlation between rows."""
    return math.sqrt(float(np.sum(np.asarray(profile.H_stderr) ** 2)))

