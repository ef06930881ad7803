"""Finite-m checks of the orderings, layer statistics and code selection.

Every check takes a tolerance. ``None`` picks the profile's convention:
0 for rational-exact engines, 1e-9 for floating coset sums, and
4 (sigma_a + sigma_b) for Monte Carlo comparisons between two entries.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .profile import Profile
from .subsets import (
    Chain,
    Subset,
    all_chains,
    canonical_chains,
    monomial_row_mask,
    ordered_masks,
    partial_order_precedes,
    rank_of_mask,
    rm_dimension,
    rm_row_set,
)

SIGMA_MULT = 4.0


# ------------------------------------------------------------------ results

@dataclass
class CheckResult:
    """One named check; ``violations`` hold plain data so they serialize."""

    check: str
    m: int
    channel: str
    tolerance: float | str
    violations: list = field(default_factory=list)
    margins: list = field(default_factory=list)
    vacuous: bool = False
    allowed: int = 0  # violations tolerated (noise allowance for MC sweeps)
    informational: bool = False  # reported, but not a theorem; never fails a run

    @property
    def ok(self) -> bool:
        return len(self.violations) <= self.allowed

    def to_record(self) -> dict:
        return {
            "check": self.check,
            "m": self.m,
            "channel": self.channel,
            "tolerance": self.tolerance,
            "violations": self.violations,
            "margins": self.margins,
            "passed": self.ok,
            "informational": self.informational,
        }


def _tol_label(profile: Profile, tolerance: float | None) -> float | str:
    if tolerance is not None:
        return tolerance
    if profile.is_exact:
        return profile.default_tolerance
    return f"{SIGMA_MULT:g}*(stderr_a+stderr_b)"


def pair_tolerance(profile: Profile, i: int, j: int, tolerance: float | None = None) -> float:
    if tolerance is not None:
        return tolerance
    if profile.is_exact:
        return profile.default_tolerance
    return SIGMA_MULT * (profile.sigma(i) + profile.sigma(j))


def _hex(a: Subset) -> str:
    return a.to_hex()


def _ge_check(profile: Profile, name: str, pairs, tolerance: float | None, values=None) -> CheckResult:
    """Report every (big, small) index pair with values[big] < values[small] - tol."""
    H = profile.H if values is None else values
    subs = profile.subsets()
    res = CheckResult(name, profile.m, profile.channel.spec, _tol_label(profile, tolerance))
    worst = math.inf
    count = 0
    for i, j in pairs:
        count += 1
        margin = float(H[i] - H[j])
        worst = min(worst, margin)
        if margin < -pair_tolerance(profile, i, j, tolerance):
            res.violations.append({"a": _hex(subs[i]), "b": _hex(subs[j]), "margin": margin})
    res.vacuous = count == 0
    if count:
        res.margins = [worst]
    return res


# ------------------------------------------------------------- orderings

def partial_order_pairs(m: int):
    """Index pairs (i, j) in total-order rank with subset_i strictly preceding subset_j."""
    subs = [Subset(m, x) for x in ordered_masks(m)]
    for i, a in enumerate(subs):
        for j, b in enumerate(subs):
            if i != j and partial_order_precedes(a, b):
                yield i, j


def check_partial_order(profile: Profile, tolerance: float | None = None) -> CheckResult:
    """A before B in the partial order implies H_A >= H_B."""
    return _ge_check(profile, "partial-order", partial_order_pairs(profile.m), tolerance)


def check_total_order(
    profile: Profile, tolerance: float | None = None, allowed_fraction: float | None = None
) -> CheckResult:
    """Adjacent pairs along the total order: H should not increase.

    Exact profiles tolerate no violations; Monte Carlo profiles tolerate a
    fraction (default 1%) of adjacent pairs beyond the statistical slack.
    """
    pairs = [(i, i + 1) for i in range(profile.n - 1)]
    res = _ge_check(profile, "total-order-adjacent", pairs, tolerance)
    # incomparable neighbours in the partial order may legitimately invert
    res.informational = True
    if allowed_fraction is None:
        allowed_fraction = 0.0 if profile.is_exact else 0.01
    res.allowed = int(math.floor(allowed_fraction * len(pairs)))
    res.margins.append(len(res.violations) / max(1, len(pairs)))
    return res


def check_layer_separation(profile: Profile, tolerance: float | None = None) -> CheckResult:
    """|A| > |B| implies H_A >= H_B (min of a layer against max of the layer below)."""
    m = profile.m
    subs = profile.subsets()
    layers: dict[int, list[int]] = {}
    for i, a in enumerate(subs):
        layers.setdefault(len(a), []).append(i)
    pairs = []
    for k in range(1, m + 1):
        lo = min(layers[k], key=lambda i: profile.H[i])
        hi = max(layers[k - 1], key=lambda i: profile.H[i])
        pairs.append((lo, hi))
    return _ge_check(profile, "layer-separation", pairs, tolerance)


def chain_pairs(chain: Chain, profile: Profile):
    idx = [profile.index(a) for a in chain.sets]
    # larger sets come first in the decoding order and carry higher entropy
    return [(idx[i + 1], idx[i]) for i in range(chain.m)]


def check_chain_monotone(profile: Profile, chain: Chain, tolerance: float | None = None) -> CheckResult:
    """H_{A_0} <= H_{A_1} <= ... <= H_{A_m}."""
    res = _ge_check(profile, "chain-monotone", chain_pairs(chain, profile), tolerance)
    res.margins.insert(0, list(chain.permutation()))
    return res


def check_all_chains(profile: Profile, tolerance: float | None = None, chains=None) -> CheckResult:
    chains = all_chains(profile.m) if chains is None else chains
    pairs = {p for c in chains for p in chain_pairs(c, profile)}
    return _ge_check(profile, "chain-monotone", sorted(pairs), tolerance)


def transition_width(profile: Profile, chain: Chain, eps: float) -> int:
    """|{i : eps < H_{A_i} < 1 - eps}|."""
    return sum(1 for a in chain.sets if eps < profile.h(a) < 1.0 - eps)


def symmetry_pairs(m: int):
    """(A + i1, A + i2) rank pairs with i1 < i2 both outside A."""
    ranks = rank_of_mask(m)
    for a in range(1 << m):
        outside = [i for i in range(m) if not a >> i & 1]
        for x, i1 in enumerate(outside):
            for i2 in outside[x + 1:]:
                yield ranks[a | 1 << i1], ranks[a | 1 << i2]


def check_symmetry(profile: Profile, tolerance: float | None = None) -> list[CheckResult]:
    """H and Z of A + i1 dominate those of A + i2 when i1 < i2."""
    pairs = list(symmetry_pairs(profile.m))
    out = [_ge_check(profile, "symmetry-H", pairs, tolerance)]
    if profile.Z is not None:
        out.append(_ge_check(profile, "symmetry-Z", pairs, tolerance, values=profile.Z))
    return out


# ---------------------------------------------------------- pointwise bounds

def check_pointwise(profile: Profile, tolerance: float | None = None) -> list[CheckResult]:
    """H <= Z, (1 - H)^2 <= 1 - Z^2, P_e <= Z and P_e <= 1/2."""
    if profile.Z is None:
        return []
    tol = profile.default_tolerance if tolerance is None else tolerance
    subs = profile.subsets()
    H, Z = profile.H, profile.Z
    tests = {
        "H<=Z": Z - H,
        "(1-H)^2<=1-Z^2": (1 - Z * Z) - (1 - H) ** 2,
    }
    if profile.Pe is not None:
        tests["Pe<=Z"] = Z - profile.Pe
        tests["Pe<=1/2"] = 0.5 - profile.Pe
    out = []
    for name, margin in tests.items():
        res = CheckResult(name, profile.m, profile.channel.spec, tol, margins=[float(margin.min())])
        for i in np.flatnonzero(margin < -tol):
            res.violations.append({"a": _hex(subs[i]), "margin": float(margin[i])})
        out.append(res)
    return out


def check_sum_rule(profile: Profile, tolerance: float = 1e-9) -> CheckResult:
    """sum_A H_A = n (1 - I(W))."""
    target = profile.n * (1.0 - profile.channel.capacity())
    diff = profile.total_entropy() - target
    if not profile.is_exact:
        tolerance = SIGMA_MULT * math.sqrt(float(np.sum(profile.H_stderr ** 2)))
    res = CheckResult("sum-rule", profile.m, profile.channel.spec, tolerance, margins=[diff])
    if abs(diff) > tolerance:
        res.violations.append({"sum": profile.total_entropy(), "target": target})
    return res


# ------------------------------------------------------------ layer stats

@dataclass
class LayerStats:
    m: int
    H_max: np.ndarray
    H_min: np.ndarray
    H_avg: np.ndarray
    max_sigma: np.ndarray
    min_sigma: np.ndarray
    avg_sigma: np.ndarray

    def rows(self):
        for i in range(self.m + 1):
            yield i, float(self.H_max[i]), float(self.H_min[i]), float(self.H_avg[i])


def layer_stats(profile: Profile) -> LayerStats:
    """Canonical max/min entries and layer means for every cardinality."""
    m = profile.m
    mx, mn, avg = np.zeros(m + 1), np.zeros(m + 1), np.zeros(m + 1)
    smx, smn, savg = np.zeros(m + 1), np.zeros(m + 1), np.zeros(m + 1)
    sums: dict[int, list[int]] = {}
    for i, a in enumerate(profile.subsets()):
        sums.setdefault(len(a), []).append(i)
    se = np.asarray(profile.H_stderr)
    for i in range(m + 1):
        hi = profile.index(Subset.of(m, range(1, i + 1)))
        lo = profile.index(Subset.of(m, range(m - i + 1, m + 1)))
        mx[i], mn[i] = profile.H[hi], profile.H[lo]
        smx[i], smn[i] = se[hi], se[lo]
        idx = sums[i]
        avg[i] = float(np.mean(profile.H[idx]))
        savg[i] = math.sqrt(float(np.sum(se[idx] ** 2))) / len(idx)
    return LayerStats(m, mx, mn, avg, smx, smn, savg)


def check_layer_stats(profile: Profile, tolerance: float | None = None) -> list[CheckResult]:
    """Each sequence nondecreasing in i; max >= avg >= min per layer."""
    st = layer_stats(profile)
    label = _tol_label(profile, tolerance)
    exact_tol = profile.default_tolerance if tolerance is None else tolerance

    def tol(sa, sb):
        if tolerance is not None or profile.is_exact:
            return exact_tol
        return SIGMA_MULT * (sa + sb)

    out = []
    for name, seq, sig in (("max", st.H_max, st.max_sigma), ("min", st.H_min, st.min_sigma),
                           ("avg", st.H_avg, st.avg_sigma)):
        res = CheckResult(f"layer-{name}-nondecreasing", profile.m, profile.channel.spec, label)
        for i in range(profile.m):
            d = float(seq[i + 1] - seq[i])
            res.margins.append(d)
            if d < -tol(sig[i], sig[i + 1]):
                res.violations.append({"layer": i, "margin": d})
        res.vacuous = profile.m == 0
        out.append(res)
    res = CheckResult("layer-max>=avg>=min", profile.m, profile.channel.spec, label)
    for i in range(profile.m + 1):
        d1 = float(st.H_max[i] - st.H_avg[i])
        d2 = float(st.H_avg[i] - st.H_min[i])
        res.margins.append(min(d1, d2))
        if d1 < -tol(st.max_sigma[i], st.avg_sigma[i]) or d2 < -tol(st.avg_sigma[i], st.min_sigma[i]):
            res.violations.append({"layer": i, "margin": min(d1, d2)})
    out.append(res)
    return out


def gap_check(profile: Profile, tolerance: float | None = None) -> tuple[bool, list[float], CheckResult]:
    """H_{i,max} <= H_{i+1,min} for 0 <= i < m; margins H_{i+1,min} - H_{i,max}."""
    st = layer_stats(profile)
    res = CheckResult("gap", profile.m, profile.channel.spec, _tol_label(profile, tolerance))
    for i in range(profile.m):
        d = float(st.H_min[i + 1] - st.H_max[i])
        res.margins.append(d)
        if tolerance is not None:
            t = tolerance
        elif profile.is_exact:
            t = profile.default_tolerance
        else:
            t = SIGMA_MULT * (st.min_sigma[i + 1] + st.max_sigma[i])
        if d < -t:
            res.violations.append({"layer": i, "margin": d})
    res.vacuous = profile.m == 0
    return res.ok, res.margins, res


# ------------------------------------------------------------- transitions

@dataclass
class TransitionReport:
    """Transition locations of the canonical max/min sequences.

    ``theta_*`` is -1 when no layer has entropy <= 1/2. ``uncertain`` lists
    layers whose Monte Carlo value sits within the statistical tolerance of
    1/2, which may shift the reported location.
    """

    m: int
    theta_max: int
    theta_min: int
    max_undefined: bool
    min_undefined: bool
    tolerance: float | str
    uncertain: list = field(default_factory=list)

    @property
    def spread(self) -> int:
        return self.theta_min - self.theta_max

    @property
    def normalized_spread(self) -> float:
        return self.spread / math.sqrt(self.m) if self.m else 0.0

    @property
    def ordered(self) -> bool:
        return self.theta_max <= self.theta_min


def theta_report(profile: Profile) -> TransitionReport:
    st = layer_stats(profile)

    def theta(seq):
        hits = [i for i in range(profile.m + 1) if seq[i] <= 0.5]
        return (max(hits), False) if hits else (-1, True)

    tmax, umax = theta(st.H_max)
    tmin, umin = theta(st.H_min)
    uncertain = []
    if not profile.is_exact:
        for name, seq, sig in (("max", st.H_max, st.max_sigma), ("min", st.H_min, st.min_sigma)):
            for i in range(profile.m + 1):
                if abs(seq[i] - 0.5) < SIGMA_MULT * sig[i]:
                    uncertain.append((name, i))
    return TransitionReport(profile.m, tmax, tmin, umax, umin, _tol_label(profile, None), uncertain)


def polarization_fraction(profile: Profile, eps: float, delta_n: float) -> float:
    """|{H_A > 1 - eps} union {Z_A < delta_n}| / n."""
    Z = profile.H if profile.Z is None else profile.Z
    hit = (profile.H > 1.0 - eps) | (Z < delta_n)
    return float(np.count_nonzero(hit)) / profile.n


# ------------------------------------------------------------- twin codes

@dataclass
class TwinCodeSpec:
    m: int
    delta_n: float
    selected: tuple[Subset, ...]
    rows: tuple[int, ...]
    nearest_r: int
    added: tuple[Subset, ...]
    missing: tuple[Subset, ...]
    order_suffix: bool

    @property
    def dimension(self) -> int:
        return len(self.selected)

    @property
    def rate(self) -> float:
        return self.dimension / (1 << self.m)

    @property
    def is_rm(self) -> bool:
        return not self.added and not self.missing


def twin_select(profile: Profile, delta_n: float) -> TwinCodeSpec:
    """Rows with Z_A < delta_n, compared with the nearest-dimension RM code."""
    if profile.Z is None:
        raise ValueError("twin selection needs Bhattacharyya parameters")
    m = profile.m
    subs = profile.subsets()
    sel_idx = [i for i in range(profile.n) if profile.Z[i] < delta_n]
    selected = tuple(subs[i] for i in sel_idx)
    k = len(selected)
    r_best = min(range(-1, m + 1), key=lambda r: (abs(rm_dimension(m, r) - k), r))
    rm = rm_row_set(m, r_best) if r_best >= 0 else set()
    sel = set(selected)
    added = tuple(a for a in subs if a in sel and a not in rm)
    missing = tuple(a for a in subs if a in rm and a not in sel)
    suffix = sel_idx == list(range(profile.n - k, profile.n))
    rows = tuple(monomial_row_mask(m, a.mask) for a in selected)
    return TwinCodeSpec(m, delta_n, selected, rows, r_best, added, missing, suffix)


def layer_z_ranges(profile: Profile) -> list[tuple[float, float]]:
    """(min Z, max Z) per cardinality."""
    out = []
    for i in range(profile.m + 1):
        vals = [profile.Z[j] for j, a in enumerate(profile.subsets()) if len(a) == i]
        out.append((float(min(vals)), float(max(vals))))
    return out


def separating_deltas(profile: Profile) -> list[tuple[int, float]]:
    """(r, delta) with delta strictly between the Z ranges of layers r and r + 1.

    Only layers whose ranges do not overlap yield a delta; for such delta
    the selection equals RM(m, r) exactly when the ordering holds.
    """
    rng = layer_z_ranges(profile)
    out = []
    for r in range(profile.m):
        hi_r, lo_next = rng[r][1], rng[r + 1][0]
        if hi_r < lo_next:
            out.append((r, 0.5 * (hi_r + lo_next)))
    return out


# ----------------------------------------------------- across levels m, m+1

def _lift_pairs(m: int):
    """(A over [m], j) for every j in [m+1] outside A."""
    for a in range(1 << m):
        for j in range(m + 1):
            if not a >> j & 1:
                yield a, j


def check_interlacing(
    prof_m: Profile, prof_next: Profile, tolerance: float | None = None
) -> list[CheckResult]:
    """H_{A+j}^{m+1} >= H_A^m >= H_A^{m+1}; with Z, also Z_A^{m+1} <= (Z_A^m)^2 <= ..."""
    if prof_next.m != prof_m.m + 1:
        raise ValueError("profiles must be at consecutive m")
    if prof_m.channel != prof_next.channel:
        raise ValueError("profiles are for different channels")
    m = prof_m.m
    spec = prof_m.channel.spec
    r0, r1 = rank_of_mask(m), rank_of_mask(m + 1)
    exact = prof_m.is_exact and prof_next.is_exact

    def tol(i0, i1):
        if tolerance is not None:
            return tolerance
        if exact:
            return max(prof_m.default_tolerance, prof_next.default_tolerance)
        return SIGMA_MULT * (prof_m.sigma(i0) + prof_next.sigma(i1))

    label = tolerance if tolerance is not None else (
        max(prof_m.default_tolerance, prof_next.default_tolerance) if exact
        else f"{SIGMA_MULT:g}*(stderr_a+stderr_b)")
    up = CheckResult("interlacing-H-upper", m, spec, label)
    down = CheckResult("interlacing-H-lower", m, spec, label)
    checks = [up, down]
    with_z = exact and prof_m.Z is not None and prof_next.Z is not None
    if with_z:
        zsq = CheckResult("interlacing-Z-square", m, spec, label)
        zup = CheckResult("interlacing-Z-upper", m, spec, label)
        checks += [zsq, zup]
    # rational values, when the engine kept them, make the squaring exact
    q0, q1 = prof_m.meta.get("exact"), prof_next.meta.get("exact")
    wu = wd = wzs = wzu = math.inf
    for a in range(1 << m):
        i0, i1 = r0[a], r1[a]
        d = float(prof_m.H[i0] - prof_next.H[i1])
        wd = min(wd, d)
        if d < -tol(i0, i1):
            down.violations.append({"a": Subset(m, a).to_hex(), "margin": d})
        if with_z:
            if q0 is not None and q1 is not None:
                d = float(q0[a] * q0[a] - q1[a])
            else:
                z0 = float(prof_m.Z[i0])
                d = z0 * z0 - float(prof_next.Z[i1])
            wzs = min(wzs, d)
            if d < -tol(i0, i1):
                zsq.violations.append({"a": Subset(m, a).to_hex(), "margin": d})
    for a, j in _lift_pairs(m):
        i0, i2 = r0[a], r1[a | 1 << j]
        d = float(prof_next.H[i2] - prof_m.H[i0])
        wu = min(wu, d)
        if d < -tol(i0, i2):
            up.violations.append({"a": Subset(m, a).to_hex(), "j": j + 1, "margin": d})
        if with_z:
            d = float(prof_next.Z[i2] - prof_m.Z[i0])
            wzu = min(wzu, d)
            if d < -tol(i0, i2):
                zup.violations.append({"a": Subset(m, a).to_hex(), "j": j + 1, "margin": d})
    up.margins, down.margins = [wu], [wd]
    if with_z:
        zsq.margins, zup.margins = [wzs], [wzu]
    return checks


@dataclass
class StrictGap:
    min_down: float | None
    min_up: float | None
    interior: int

    @property
    def vacuous(self) -> bool:
        return self.interior == 0

    @property
    def ok(self) -> bool:
        return self.vacuous or (self.min_down > 0 and self.min_up > 0)


def strict_gap_probe(prof_m: Profile, prof_next: Profile, eps: float) -> StrictGap:
    """Minimum strict interlacing gaps over A with H_A^m in (eps, 1 - eps)."""
    m = prof_m.m
    r0, r1 = rank_of_mask(m), rank_of_mask(m + 1)
    down, up, count = math.inf, math.inf, 0
    for a in range(1 << m):
        h = float(prof_m.H[r0[a]])
        if not eps < h < 1.0 - eps:
            continue
        count += 1
        down = min(down, h - float(prof_next.H[r1[a]]))
        for j in range(m + 1):
            if not a >> j & 1:
                up = min(up, float(prof_next.H[r1[a | 1 << j]]) - h)
    if count == 0:
        return StrictGap(None, None, 0)
    return StrictGap(down, up, count)


# ------------------------------------------------ conditioning monotonicity

def check_conditioning(m: int, ch, tolerance: float = 1e-9) -> CheckResult:
    """Z(U_A | Y, U_K + B) <= Z(U_A | Y, U_K) along the decoding ladder."""
    from .exact import exact_conditional

    masks = ordered_masks(m)
    res = CheckResult("conditioning-Z", m, ch.spec, tolerance)
    worst = math.inf
    for t, a in enumerate(masks):
        target = Subset(m, a)
        known = [Subset(m, x) for x in masks[:t]]
        _, z0, _ = exact_conditional(m, ch, target, known)
        for b in masks[t + 1:]:
            _, z1, _ = exact_conditional(m, ch, target, known + [Subset(m, b)])
            worst = min(worst, z0 - z1)
            if z1 > z0 + tolerance:
                res.violations.append({"a": target.to_hex(), "b": Subset(m, b).to_hex(), "margin": z0 - z1})
    res.margins = [worst] if worst < math.inf else []
    res.vacuous = m == 0
    return res


# ------------------------------------------------------------ combinatorics

def chain_membership_counts(m: int) -> Counter:
    """How often each subset mask occurs across all m! chains."""
    c: Counter = Counter()
    for chain in all_chains(m):
        for a in chain.sets:
            c[a.mask] += 1
    return c


def check_chain_counts(m: int) -> CheckResult:
    """Each A appears |A|! (m - |A|)! times across all chains."""
    counts = chain_membership_counts(m)
    res = CheckResult("chain-count", m, "-", 0)
    for a in range(1 << m):
        k = bin(a).count("1")
        want = math.factorial(k) * math.factorial(m - k)
        if counts[a] != want:
            res.violations.append({"a": Subset(m, a).to_hex(), "count": counts[a], "expected": want})
    return res


# ---------------------------------------------------------------- suites

def profile_suite(profile: Profile, tolerance: float | None = None, chains: Sequence[Chain] | None = None) -> list[CheckResult]:
    """All single-profile checks applicable to ``profile``."""
    out = [check_sum_rule(profile), check_partial_order(profile, tolerance)]
    if chains is None and profile.m <= 5:
        out.append(check_all_chains(profile, tolerance))
    else:
        chosen = chains if chains is not None else (canonical_chains(profile.m) if profile.m else [])
        for c in chosen:
            out.append(check_chain_monotone(profile, c, tolerance))
    out += check_symmetry(profile, tolerance)
    if profile.is_exact:
        out += check_pointwise(profile, tolerance)
    out += check_layer_stats(profile, tolerance)
    out.append(gap_check(profile, tolerance)[2])
    return out
