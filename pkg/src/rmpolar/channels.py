"""Binary-input memoryless symmetric channels.

Every channel exposes its output alphabet as a table of
``(P(y|0), P(y|1))`` rows and a decomposition into binary symmetric
components, which is what the exact engines consume.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ChannelSpecError

ERASURE = 2
_TOL = 1e-12


def binary_entropy(q: float) -> float:
    """h(q) in bits, with 0 log 0 = 0."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"probability out of range: {q}")
    if q == 0.0 or q == 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class NoiseRealization:
    """Per-position channel randomness for one block of ``n`` uses.

    ``pattern`` is a bool erasure indicator (BEC), a 0/1 flip vector (BSC) or
    an array of output symbol ids for input 0 (finite BMS).
    """

    kind: str
    pattern: np.ndarray

    @property
    def n(self) -> int:
        return len(self.pattern)


class Channel:
    """Common behaviour; subclasses define ``outputs`` and ``spec``."""

    kind: str

    @property
    def outputs(self) -> tuple[tuple[float, float], ...]:
        raise NotImplementedError

    @property
    def spec(self) -> str:
        raise NotImplementedError

    def capacity(self) -> float:
        total = 0.0
        for p0, p1 in self.outputs:
            py = 0.5 * (p0 + p1)
            for p in (p0, p1):
                if p > 0:
                    total += 0.5 * p * math.log2(p / py)
        return min(1.0, max(0.0, total))

    def likelihood(self, y: int, x: int) -> float:
        if x not in (0, 1):
            raise ValueError(f"input bit must be 0 or 1, got {x}")
        table = self.outputs
        if not 0 <= y < len(table):
            raise ValueError(f"unknown output symbol {y}")
        return table[y][x]

    def bsc_components(self) -> list[tuple[float, float]]:
        """Decomposition into (weight, crossover) BSC components.

        Output pairs {y, pi(y)} become one component with crossover
        min(P(y|0), P(y|1)) / (P(y|0) + P(y|1)); fixed points of pi are
        crossover 1/2. Components with equal crossover are merged.
        """
        comps: dict[float, float] = {}
        for a, b in self.outputs:
            w = a + b
            if w <= 0:
                continue
            # each member of a pair contributes half of the pair weight
            q = round(min(a, b) / w, 15)
            comps[q] = comps.get(q, 0.0) + 0.5 * w
        return sorted(((w, q) for q, w in comps.items()), key=lambda t: t[1])

    def sample_outputs(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Transmit a 0/1 array ``x``; returns output symbol ids."""
        x = np.asarray(x, dtype=np.uint8)
        table = np.asarray(self.outputs)
        u = rng.random(x.shape)
        cdf0 = np.cumsum(table[:, 0])
        cdf1 = np.cumsum(table[:, 1])
        y0 = np.minimum(np.searchsorted(cdf0, u, side="right"), len(table) - 1)
        y1 = np.minimum(np.searchsorted(cdf1, u, side="right"), len(table) - 1)
        return np.where(x == 1, y1, y0).astype(np.int64)

    def sample_noise(self, n: int, rng: np.random.Generator) -> NoiseRealization:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.spec


@dataclass(frozen=True)
class BEC(Channel):
    epsilon: float
    kind = "bec"

    def __post_init__(self):
        _check_prob("erasure probability", self.epsilon)

    @property
    def outputs(self):
        e = self.epsilon
        return ((1.0 - e, 0.0), (0.0, 1.0 - e), (e, e))

    @property
    def spec(self) -> str:
        return f"bec:{self.epsilon!r}"

    def capacity(self) -> float:
        return 1.0 - self.epsilon

    def bsc_components(self):
        comps = []
        if self.epsilon < 1.0:
            comps.append((1.0 - self.epsilon, 0.0))
        if self.epsilon > 0.0:
            comps.append((self.epsilon, 0.5))
        return comps

    def sample_noise(self, n: int, rng: np.random.Generator) -> NoiseRealization:
        return NoiseRealization("bec", rng.random(n) < self.epsilon)

    def transmit(self, x: np.ndarray, noise: NoiseRealization) -> np.ndarray:
        y = np.asarray(x, dtype=np.int64).copy()
        y[noise.pattern] = ERASURE
        return y


@dataclass(frozen=True)
class BSC(Channel):
    p: float
    kind = "bsc"

    def __post_init__(self):
        _check_prob("crossover probability", self.p)

    @property
    def outputs(self):
        return ((1.0 - self.p, self.p), (self.p, 1.0 - self.p))

    @property
    def spec(self) -> str:
        return f"bsc:{self.p!r}"

    def capacity(self) -> float:
        return 1.0 - binary_entropy(self.p)

    def bsc_components(self):
        return [(1.0, self.p)]

    def sample_noise(self, n: int, rng: np.random.Generator) -> NoiseRealization:
        return NoiseRealization("bsc", (rng.random(n) < self.p).astype(np.uint8))

    def transmit(self, x: np.ndarray, noise: NoiseRealization) -> np.ndarray:
        return (np.asarray(x, dtype=np.int64) ^ noise.pattern).astype(np.int64)


@dataclass(frozen=True)
class FiniteBMS(Channel):
    """Finite-output symmetric channel given by explicit likelihood rows."""

    rows: tuple[tuple[float, float], ...]
    source: str = ""
    kind = "bms"

    def __post_init__(self):
        rows = tuple((float(a), float(b)) for a, b in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise ValueError("channel needs at least one output")
        for a, b in rows:
            _check_prob("likelihood", a)
            _check_prob("likelihood", b)
        s0 = sum(a for a, _ in rows)
        s1 = sum(b for _, b in rows)
        if abs(s0 - 1.0) > _TOL or abs(s1 - 1.0) > _TOL:
            raise ValueError(f"conditional distributions must sum to 1 (got {s0}, {s1})")
        if symmetry_permutation(rows) is None:
            raise ValueError("channel is not symmetric: no involution swaps P(.|0) and P(.|1)")

    @property
    def outputs(self):
        return self.rows

    @property
    def spec(self) -> str:
        return f"bms:@{self.source}" if self.source else "bms:" + ";".join(f"{a!r},{b!r}" for a, b in self.rows)

    def sample_noise(self, n: int, rng: np.random.Generator) -> NoiseRealization:
        return NoiseRealization("bms", self.sample_outputs(np.zeros(n, dtype=np.uint8), rng))


def symmetry_permutation(rows: Sequence[tuple[float, float]], tol: float = 1e-12) -> list[int] | None:
    """An involution pi with P(y|1) = P(pi(y)|0), or None if none exists."""
    k = len(rows)
    pi: list[int | None] = [None] * k
    for y in range(k):
        if pi[y] is not None:
            continue
        a, b = rows[y]
        if abs(a - b) <= tol:
            pi[y] = y
            continue
        match = next(
            (z for z in range(k) if z != y and pi[z] is None
             and abs(rows[z][0] - b) <= tol and abs(rows[z][1] - a) <= tol),
            None,
        )
        if match is None:
            return None
        pi[y], pi[match] = match, y
    return pi  # type: ignore[return-value]


def capacity(ch: Channel) -> float:
    return ch.capacity()


def per_symbol_likelihoods(ch: Channel, y: int, x: int) -> float:
    return ch.likelihood(y, x)


def sample_noise(ch: Channel, n: int, rng: np.random.Generator) -> NoiseRealization:
    return ch.sample_noise(n, rng)


_NUM = r"[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?"


def parse_channel(spec: str, base_dir: Path | None = None) -> Channel:
    """Parse ``bec:0.4``, ``bsc:0.11`` or ``bms:@path``.

    The BMS file lists one output per line as ``P(y|0) P(y|1)``; ``#`` starts
    a comment.
    """
    text = spec.strip()
    head, sep, tail = text.partition(":")
    if not sep:
        raise ChannelSpecError("expected '<kind>:<parameter>'", spec, len(text))
    kind = head.lower()
    offset = len(head) + 1
    if kind in ("bec", "bsc"):
        if not re.fullmatch(_NUM, tail):
            raise ChannelSpecError("expected a probability", spec, offset)
        value = float(tail)
        if not 0.0 <= value <= 1.0:
            raise ChannelSpecError("probability outside [0, 1]", spec, offset)
        return BEC(value) if kind == "bec" else BSC(value)
    if kind == "bms":
        if not tail.startswith("@") or len(tail) < 2:
            raise ChannelSpecError("expected '@<file>'", spec, offset)
        path = Path(tail[1:])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        rows = []
        for lineno, line in enumerate(path.read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ChannelSpecError(f"{path}:{lineno}: expected two probabilities", spec, offset + 1)
            rows.append((float(parts[0]), float(parts[1])))
        try:
            return FiniteBMS(tuple(rows), source=tail[1:])
        except ValueError as exc:
            raise ChannelSpecError(str(exc), spec, offset + 1) from exc
    raise ChannelSpecError(f"unknown channel kind {head!r}", spec, 0)
