"""Standard polar bit-channels on the BEC, for comparison with the RM ordering.

Path convention: element i of a subset means the "-" transform is taken at
recursion level i, where level 1 acts first on the raw channel. With this
convention the all-"-" and all-"+" channels are indexed by [m] and the empty
set, matching the first and last RM bit-channels, and the leaf values equal
the exact bit-channels of [[1,0],[1,1]]^{(x)m} decoded top to bottom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .channels import BEC, Channel
from .errors import CapacityError
from .profile import POLAR_RECURSION, Profile
from .subsets import MAX_M, ordered_masks

MAX_POLAR_M = 20


def minus(x):
    return 2 * x - x * x


def plus(x):
    return x * x


def polar_bec_values(m: int, epsilon: float) -> np.ndarray:
    """Leaf erasure probabilities indexed by subset mask (m <= 20)."""
    if not 0 <= m <= MAX_POLAR_M:
        raise CapacityError(f"polar recursion supports 0 <= m <= {MAX_POLAR_M}")
    vals = np.array([float(epsilon)])
    for _ in range(m):
        # new top bit = element of the current level
        vals = np.concatenate([plus(vals), minus(vals)])
    return vals


def polar_bec_exact(m: int, epsilon) -> list[Fraction]:
    """Rational leaf values indexed by mask; practical for m <= 10 or so."""
    vals = [Fraction(epsilon)]
    for _ in range(m):
        vals = [plus(x) for x in vals] + [minus(x) for x in vals]
    return vals


def polar_bec_profile(m: int, epsilon: float) -> Profile:
    """Polar erasure probabilities arranged like an RM profile (m <= 16).

    ``Z`` equals ``H`` (every polar BEC bit-channel is itself a BEC). Use
    ``polar_bec_values`` for 16 < m <= 20.
    """
    if m > MAX_M:
        raise CapacityError(f"profiles are indexed by subsets of [m] with m <= {MAX_M}; use polar_bec_values")
    vals = polar_bec_values(m, epsilon)
    H = vals[np.array(ordered_masks(m))]
    return Profile(m, BEC(epsilon), POLAR_RECURSION, H, Z=H.copy(), Pe=H / 2, order="kronecker")


def sorted_profile(values) -> np.ndarray:
    """Entries sorted in decreasing order (the usual polar presentation)."""
    return np.sort(np.asarray(values, dtype=float))[::-1]


def interior_count(values, threshold: float) -> int:
    v = np.asarray(values, dtype=float)
    return int(np.count_nonzero((v > threshold) & (v < 1.0 - threshold)))


def polar_vs_rm_transition(
    m: int, epsilon: float, threshold: float, rm_profile: Profile | None = None, **mc_kwargs
) -> tuple[int, int]:
    """(width_polar, width_rm): entries strictly inside (threshold, 1 - threshold)."""
    if rm_profile is None:
        if m <= 4:
            from .exact import exact_bec_profile
            rm_profile = exact_bec_profile(m, epsilon)
        else:
            from .montecarlo import mc_bec_profile
            rm_profile = mc_bec_profile(m, epsilon, **mc_kwargs)
    if rm_profile.m != m:
        raise ValueError("RM profile has a different m")
    return interior_count(polar_bec_values(m, epsilon), threshold), interior_count(rm_profile.H, threshold)


# ------------------------------------------------------------ one-step checks

@dataclass
class BoundCheck:
    name: str
    ok: bool
    margin: float


@dataclass
class PolarBoundsReport:
    channel: str
    m: int
    checks: list[BoundCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, margin: float, tol: float = 0.0, strict: bool = False):
        ok = margin > tol if strict else margin >= -tol
        self.checks.append(BoundCheck(name, bool(ok), float(margin)))


def verify_polar_bounds(
    m: int, ch: Channel, tol: float = 1e-10, interior: float = 0.01
) -> PolarBoundsReport:
    """Check every polar step from level k to k + 1 for k < m (m <= 3).

    For a parent bit-channel P with children P- and P+ the checks are
    H(P-) >= H(P) >= H(P+), H(P-) + H(P+) = 2 H(P), Z(P+) = Z(P)^2,
    Z(P) <= Z(P-) <= 2 Z(P) - Z(P)^2, and a strictly positive entropy
    gap on both sides whenever H(P) lies in (interior, 1 - interior).
    """
    from .exact import exact_profile

    if m > 3:
        raise CapacityError("one-step polar verification supports m <= 3")
    report = PolarBoundsReport(ch.spec, m)
    levels = [exact_profile(k, ch, order="kronecker") for k in range(m + 1)]
    for k in range(m):
        par, child = levels[k], levels[k + 1]
        pr, cr = _mask_view(par), _mask_view(child)
        for s in range(1 << k):
            h, z = pr["H"][s], pr["Z"][s]
            hm, zm = cr["H"][s | (1 << k)], cr["Z"][s | (1 << k)]
            hp, zp = cr["H"][s], cr["Z"][s]
            tag = f"level {k}->{k + 1} path {s:x}"
            report.add(f"{tag}: H- >= H", hm - h, tol)
            report.add(f"{tag}: H >= H+", h - hp, tol)
            report.add(f"{tag}: H- + H+ = 2H", -abs(hm + hp - 2 * h), tol)
            report.add(f"{tag}: Z+ = Z^2", -abs(zp - z * z), tol)
            report.add(f"{tag}: Z- >= Z", zm - z, tol)
            report.add(f"{tag}: Z- <= 2Z - Z^2", 2 * z - z * z - zm, tol)
            if interior < h < 1 - interior:
                report.add(f"{tag}: strict gap H- - H", hm - h, tol, strict=True)
                report.add(f"{tag}: strict gap H - H+", h - hp, tol, strict=True)
    if m >= 1:
        # base step against the raw channel
        h0 = 1.0 - ch.capacity()
        report.add("sum rule on the raw channel", -abs(levels[1].total_entropy() - 2 * h0), tol)
    return report


def _mask_view(prof: Profile) -> dict[str, np.ndarray]:
    masks = np.array(ordered_masks(prof.m))
    out = {}
    for name in ("H", "Z"):
        arr = np.empty(prof.n)
        arr[masks] = getattr(prof, name)
        out[name] = arr
    return out


def mean_erasure(values) -> float:
    return math.fsum(np.asarray(values, dtype=float).tolist()) / len(values)

