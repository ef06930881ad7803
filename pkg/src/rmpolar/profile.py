"""Entropy/Bhattacharyya profiles over all subsets of [m]."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .channels import Channel
from .subsets import Subset, ordered_masks, rank_of_mask

# method tags
BEC_EXHAUSTIVE = "bec-exhaustive"
COSET_MIXTURE = "coset-mixture"
MC_BEC = "mc-bec"
POLAR_RECURSION = "polar-recursion"
NAIVE_JOINT = "naive-joint"

EXACT_METHODS = {BEC_EXHAUSTIVE, COSET_MIXTURE, NAIVE_JOINT, POLAR_RECURSION}


@dataclass
class Profile:
    """Per-subset H (and optionally Z, P_e) for one (m, channel).

    Arrays are indexed by the subset's position in the RM total order,
    whatever decoding order produced the values (see ``order``).
    """

    m: int
    channel: Channel
    method: str
    H: np.ndarray
    Z: np.ndarray | None = None
    Pe: np.ndarray | None = None
    H_stderr: np.ndarray | None = None
    Z_stderr: np.ndarray | None = None
    samples: int = 0
    seed: int | None = None
    order: str = "rm"
    elapsed: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = 1 << self.m
        self.H = np.asarray(self.H, dtype=float)
        if self.H.shape != (n,):
            raise ValueError(f"expected {n} entries, got {self.H.shape}")
        if self.H_stderr is None:
            self.H_stderr = np.zeros(n)
        if self.Z is not None and self.Z_stderr is None:
            self.Z_stderr = np.zeros(n)

    @property
    def n(self) -> int:
        return 1 << self.m

    @property
    def is_exact(self) -> bool:
        return self.method in EXACT_METHODS

    @property
    def default_tolerance(self) -> float:
        """0 for rational-exact engines, 1e-9 for floating coset sums."""
        if self.method in (BEC_EXHAUSTIVE, POLAR_RECURSION):
            return 0.0
        return 1e-9

    def subsets(self) -> list[Subset]:
        return [Subset(self.m, mask) for mask in ordered_masks(self.m)]

    def index(self, a: Subset) -> int:
        if a.m != self.m:
            raise ValueError(f"subset over [{a.m}] queried on a profile with m={self.m}")
        return rank_of_mask(self.m)[a.mask]

    def h(self, a: Subset) -> float:
        return float(self.H[self.index(a)])

    def z(self, a: Subset) -> float:
        if self.Z is None:
            raise ValueError("profile has no Bhattacharyya parameters")
        return float(self.Z[self.index(a)])

    def sigma(self, a: Subset | int) -> float:
        """Standard error of H; 0 for exact profiles."""
        i = a if isinstance(a, int) else self.index(a)
        return float(self.H_stderr[i])

    def z_sigma(self, a: Subset | int) -> float:
        i = a if isinstance(a, int) else self.index(a)
        if self.Z_stderr is None:
            return 0.0
        return float(self.Z_stderr[i])

    def __iter__(self) -> Iterator[tuple[Subset, float]]:
        for a, h in zip(self.subsets(), self.H):
            yield a, float(h)

    def total_entropy(self) -> float:
        return math.fsum(self.H.tolist())
