"""Command-line interface: ``rmpolar <command> [options]``."""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    CheckResult,
    check_chain_counts,
    check_conditioning,
    check_interlacing,
    check_layer_separation,
    check_total_order,
    gap_check,
    layer_stats,
    polarization_fraction,
    profile_suite,
    strict_gap_probe,
    theta_report,
    twin_select,
)
from .channels import BEC, Channel, parse_channel
from .codec import block_error_sim, rm_code, twin_code, union_bound
from .errors import CapacityError, ChannelSpecError
from .exact import MAX_EXACT_M, exact_profile
from .montecarlo import DEFAULT_SAMPLES, MAX_MC_M, mc_bec_profile
from .polar import interior_count, polar_bec_profile, polar_bec_values, sorted_profile, verify_polar_bounds
from .profile import Profile
from .subsets import Subset, ordered_masks

CACHE_ENV = "RMPOLAR_CACHE_DIR"
ENGINE_VERSION = f"rmpolar-{__version__}"
PROFILE_COLUMNS = ["rank", "subset_hex", "cardinality", "H", "H_stderr", "Z", "Z_stderr", "method"]


class UsageError(Exception):
    """Bad argument combination; reported without a traceback."""


def fmt(x) -> str:
    return "%.17g" % x


# ----------------------------------------------------------------- config

def resolve_delta(spec: str, m: int) -> float:
    """``n^-k`` becomes 2^(-k m); anything else must be a number."""
    text = spec.strip().replace(" ", "")
    mt = re.fullmatch(r"n\^\(?-([0-9]*\.?[0-9]+)\)?", text)
    if mt:
        return 2.0 ** (-float(mt.group(1)) * m)
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"--delta must be a number or 'n^-k', got {spec!r}") from None
    if value < 0:
        raise UsageError("--delta must be nonnegative")
    return value


def get_profile(args, m: int | None = None, ch: Channel | None = None) -> Profile:
    m = args.m if m is None else m
    ch = args.channel_obj if ch is None else ch
    if m <= MAX_EXACT_M or args.force_exact:
        if m > MAX_EXACT_M:
            raise UsageError(f"exact engines support m <= {MAX_EXACT_M}")
        prof = exact_profile(m, ch)
        prof.seed = args.seed  # unused by exact engines, echoed for provenance
        return prof
    if not isinstance(ch, BEC):
        raise UsageError(f"unsupported combination: {ch.kind.upper()} profile at m={m} "
                         f"(Monte Carlo covers the BEC only; exact engines stop at m={MAX_EXACT_M})")
    if m > MAX_MC_M:
        raise UsageError(f"Monte Carlo engine supports m <= {MAX_MC_M}")
    return mc_bec_profile(m, ch.epsilon, args.samples, args.seed, threads=args.threads)


# --------------------------------------------------------------- profile IO

def profile_header(p: Profile) -> str:
    return (f"# m={p.m} channel={p.channel.spec} method={p.method} samples={p.samples} "
            f"seed={p.seed if p.seed is not None else '-'} engine={ENGINE_VERSION}\n")


def profile_csv(p: Profile) -> str:
    out = io.StringIO()
    out.write(profile_header(p))
    out.write(",".join(PROFILE_COLUMNS) + "\n")
    for i, a in enumerate(p.subsets()):
        z = fmt(p.Z[i]) if p.Z is not None else ""
        zs = fmt(p.Z_stderr[i]) if p.Z is not None else ""
        out.write(f"{i},{a.to_hex()},{len(a)},{fmt(p.H[i])},{fmt(p.H_stderr[i])},{z},{zs},{p.method}\n")
    return out.getvalue()


def read_profile_csv(text: str, channel: Channel | None = None) -> Profile:
    """Inverse of ``profile_csv``; the channel comes from the header if not given."""
    meta = {}
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            meta.update(kv.split("=", 1) for kv in line[1:].split() if "=" in kv)
        elif line and not line.startswith("rank"):
            rows.append(line.split(","))
    n = len(rows)
    m = n.bit_length() - 1
    if 1 << m != n:
        raise ValueError(f"profile has {n} rows, not a power of two")
    if channel is None:
        channel = parse_channel(meta["channel"])
    masks = ordered_masks(m)
    for i, r in enumerate(rows):
        if int(r[0]) != i or int(r[1], 16) != masks[i]:
            raise ValueError(f"row {i} is out of total order")
    col = lambda k: np.array([float(r[k]) for r in rows])  # noqa: E731
    has_z = all(r[5] != "" for r in rows)
    seed = meta.get("seed", "-")
    return Profile(
        m, channel, rows[0][7] if rows else "", col(3),
        Z=col(5) if has_z else None, H_stderr=col(4), Z_stderr=col(6) if has_z else None,
        samples=int(meta.get("samples", 0)), seed=None if seed == "-" else int(seed),
    )


# ------------------------------------------------------------------ cache

def cache_key(command: str, args, extra: dict | None = None) -> str:
    payload = {
        "command": command,
        "m": args.m,
        "channel": args.channel,
        "samples": args.samples,
        "seed": args.seed,
        "delta": args.delta,
        "epsilon": args.epsilon,
        "force_exact": args.force_exact,
        "tolerance": getattr(args, "tolerance", None),
        "engine": ENGINE_VERSION,
        **(extra or {}),
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def cached(command: str, args, produce, extra: dict | None = None) -> str:
    """Return produce()'s text, reusing a cached copy keyed by the content hash."""
    cdir = args.cache_dir or os.environ.get(CACHE_ENV)
    if not cdir:
        return produce()
    path = Path(cdir) / f"{command}-{cache_key(command, args, extra)}.txt"
    if path.exists():
        return path.read_text()
    text = produce()
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(text)
    tmp.replace(path)
    return text


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, Subset):
        return o.to_hex()
    raise TypeError(f"cannot serialize {type(o).__name__}")


# ---------------------------------------------------------------- commands

def cmd_profile(args) -> int:
    emit(cached("profile", args, lambda: profile_csv(get_profile(args))), args.out)
    return 0


def verify_records(args) -> list:
    """All applicable checks as CheckResult objects."""
    p = get_profile(args)
    ch = args.channel_obj
    tol = args.tolerance
    checks = profile_suite(p, tol)
    if p.is_exact:
        checks.append(check_layer_separation(p, tol))
        if p.m >= 1:
            prev = get_profile(args, m=p.m - 1)
            checks += check_interlacing(prev, p, tol)
            checks.append(_strict_gap_record(prev, p, args.epsilon))
        if p.m <= 3:
            checks.append(check_conditioning(p.m, ch))
            rep = verify_polar_bounds(p.m, ch)
            checks.append(_polar_record(rep, ch))
    checks.append(check_total_order(p, tol))
    if p.m <= 5:
        checks.append(check_chain_counts(p.m))
    return checks


def _strict_gap_record(prev: Profile, p: Profile, eps: float):
    g = strict_gap_probe(prev, p, eps)
    res = CheckResult("strict-interlacing-gap", prev.m, p.channel.spec, f"> 0 on H in ({eps}, {1 - eps})")
    res.vacuous = g.vacuous
    if not g.vacuous:
        res.margins = [g.min_down, g.min_up]
        if not g.ok:
            res.violations.append({"min_down": g.min_down, "min_up": g.min_up})
    return res


def _polar_record(rep, ch):
    res = CheckResult("polar-one-step", rep.m, ch.spec, 1e-10)
    for c in rep.checks:
        if not c.ok:
            res.violations.append({"check": c.name, "margin": c.margin})
    res.margins = [min((c.margin for c in rep.checks), default=0.0)]
    res.vacuous = not rep.checks
    return res


def cmd_verify(args) -> int:
    def produce():
        checks = verify_records(args)
        failed = [c.check for c in checks if not c.ok and not c.vacuous and not c.informational]
        return to_json({
            "m": args.m,
            "channel": args.channel_obj.spec,
            "samples": args.samples,
            "seed": args.seed,
            "passed": not failed,
            "failed": failed,
            "records": [c.to_record() for c in checks],
        })

    text = cached("verify", args, produce)
    emit(text, args.out)
    return 0 if json.loads(text)["passed"] else 1


def layers_csv(p: Profile) -> str:
    st = layer_stats(p)
    out = io.StringIO()
    out.write(profile_header(p))
    out.write("layer,H_max,H_min,H_avg,H_max_stderr,H_min_stderr,H_avg_stderr\n")
    for i in range(p.m + 1):
        out.write(",".join([str(i)] + [fmt(v) for v in (
            st.H_max[i], st.H_min[i], st.H_avg[i], st.max_sigma[i], st.min_sigma[i], st.avg_sigma[i])]) + "\n")
    return out.getvalue()


def cmd_layers(args) -> int:
    emit(cached("layers", args, lambda: layers_csv(get_profile(args))), args.out)
    return 0


def cmd_gap(args) -> int:
    def produce():
        p = get_profile(args)
        ok, margins, res = gap_check(p, args.tolerance)
        th = theta_report(p)
        rec = res.to_record()
        rec.update({
            "seed": args.seed,
            "holds": ok,
            "theta_max": th.theta_max,
            "theta_min": th.theta_min,
            "theta_max_undefined": th.max_undefined,
            "theta_min_undefined": th.min_undefined,
            "theta_spread_over_sqrt_m": th.normalized_spread,
            "theta_uncertain_layers": [list(u) for u in th.uncertain],
        })
        return to_json(rec)

    text = cached("gap", args, produce)
    emit(text, args.out)
    return 0 if json.loads(text)["holds"] else 1


def twin_record(args, p: Profile) -> dict:
    delta = resolve_delta(args.delta, p.m)
    spec = twin_select(p, delta)
    code = twin_code(spec)
    ub, ub_se = union_bound(code, p)
    return {
        "m": p.m,
        "channel": p.channel.spec,
        "seed": args.seed,
        "samples": p.samples,
        "delta_n": delta,
        "dimension": spec.dimension,
        "rate": spec.rate,
        "capacity": p.channel.capacity(),
        "selected": [a.to_hex() for a in spec.selected],
        "nearest_rm_order": spec.nearest_r,
        "added_vs_rm": [a.to_hex() for a in spec.added],
        "missing_vs_rm": [a.to_hex() for a in spec.missing],
        "equals_rm": spec.is_rm,
        "suffix_of_total_order": spec.order_suffix,
        "union_bound": ub,
        "union_bound_stderr": ub_se,
        "polarization_fraction": polarization_fraction(p, args.epsilon, delta),
    }


def cmd_twin(args) -> int:
    emit(cached("twin", args, lambda: to_json(twin_record(args, get_profile(args)))), args.out)
    return 0


def polar_csv(m: int, eps: float, sort: bool) -> str:
    out = io.StringIO()
    out.write(f"# m={m} channel=bec:{eps!r} method=polar-recursion engine={ENGINE_VERSION}\n")
    if sort:
        out.write("index,H_polar\n")
        for i, v in enumerate(sorted_profile(polar_bec_values(m, eps))):
            out.write(f"{i},{fmt(v)}\n")
        return out.getvalue()
    p = polar_bec_profile(m, eps)
    return profile_csv(p)


def cmd_polar(args) -> int:
    ch = args.channel_obj
    if not isinstance(ch, BEC):
        raise UsageError("the polar recursion baseline is defined for the BEC only")
    emit(cached("polar", args, lambda: polar_csv(args.m, ch.epsilon, args.sorted),
                {"sorted": args.sorted}), args.out)
    return 0


def cmd_decode(args) -> int:
    def produce():
        p = get_profile(args)
        if args.code == "twin":
            code = twin_code(twin_select(p, resolve_delta(args.delta, p.m)))
        else:
            mt = re.fullmatch(r"rm:(\d+)", args.code)
            if not mt:
                raise UsageError("--code must be 'twin' or 'rm:<r>'")
            code = rm_code(p.m, int(mt.group(1)))
        frames = args.frames or args.samples
        sim = block_error_sim(code, args.channel_obj, frames, args.seed, profile=p, threads=args.threads)
        rec = sim.to_record()
        rec["code"] = {"name": code.name, "m": code.m, "k": code.k, "rate": code.k / code.n,
                       "information": [a.to_hex() for a in code.info_subsets()]}
        rec["profile_method"] = p.method
        return to_json(rec)

    emit(cached("decode", args, produce, {"code": args.code, "frames": args.frames}), args.out)
    return 0


def gap_csv(p: Profile) -> str:
    return layers_csv(p)


def cmd_reproduce_figures(args) -> int:
    outdir = Path(args.out or "figures")
    outdir.mkdir(parents=True, exist_ok=True)
    ch = args.channel_obj
    if not isinstance(ch, BEC):
        raise UsageError("figure reproduction uses the BEC")
    eps = ch.epsilon
    files = {}

    def mc(m):
        return mc_bec_profile(m, eps, args.samples, args.seed, threads=args.threads)

    files["fig_vb1.csv"] = cached("profile", _with(args, m=7), lambda: profile_csv(mc(7)))
    prof8_text = cached("profile", _with(args, m=8), lambda: profile_csv(mc(8)))
    files["fig_vb2.csv"] = prof8_text
    files["fig_vb3.csv"] = cached("polar", _with(args, m=8), lambda: polar_csv(8, eps, True), {"sorted": True})
    p8 = read_profile_csv(prof8_text, ch)
    files["fig_gap.csv"] = layers_csv(p8)
    for name, text in files.items():
        (outdir / name).write_text(text)
    wp, wr = interior_count(polar_bec_values(8, eps), args.epsilon), interior_count(p8.H, args.epsilon)
    print(f"wrote {', '.join(sorted(files))} to {outdir}; interior widths at threshold "
          f"{args.epsilon}: RM {wr}, polar {wp}", file=sys.stderr)
    return 0


def _with(args, **changes):
    ns = argparse.Namespace(**vars(args))
    for k, v in changes.items():
        setattr(ns, k, v)
    return ns


# ------------------------------------------------------------------ parser

COMMANDS = {
    "profile": (cmd_profile, "entropy profile CSV (exact for m <= 4, Monte Carlo BEC beyond)"),
    "verify": (cmd_verify, "run every applicable check; nonzero exit on failure"),
    "layers": (cmd_layers, "per-layer max/min/avg entropies"),
    "gap": (cmd_gap, "gap property and transition locations"),
    "twin": (cmd_twin, "select the twin code {A : Z_A < delta}"),
    "polar": (cmd_polar, "polar-recursion baseline profile (BEC)"),
    "decode": (cmd_decode, "simulate successive decoding of a twin or RM code"),
    "reproduce-figures": (cmd_reproduce_figures, "write fig_vb1/vb2/vb3/gap CSVs"),
}


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def _pos_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _prob(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0 or math.isnan(v):
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--channel", default="bec:0.4", help="bec:<eps>, bsc:<p> or bms:@<file> (default bec:0.4)")
    g.add_argument("--m", type=_nonneg_int, default=None, help="number of variables, n = 2^m")
    g.add_argument("--samples", type=_pos_int, default=DEFAULT_SAMPLES, help="Monte Carlo samples / frames")
    g.add_argument("--seed", type=_nonneg_int, default=0, help="random seed (default 0)")
    g.add_argument("--delta", default="n^-2", help="twin threshold: a number or 'n^-k' (default n^-2)")
    g.add_argument("--epsilon", type=_prob, default=0.1, help="transition threshold (default 0.1)")
    g.add_argument("--out", default=None, help="output file (directory for reproduce-figures)")
    g.add_argument("--cache-dir", default=None, help=f"result cache directory (env {CACHE_ENV})")
    g.add_argument("--threads", type=_pos_int, default=None, help="worker threads")
    g.add_argument("--force-exact", action="store_true", help="refuse Monte Carlo; exact engines only")
    g.add_argument("--tolerance", type=float, default=None,
                   help="absolute slack for the checks in verify/gap (default: 0 or 1e-9 for exact "
                        "engines, 4 standard errors for Monte Carlo)")

    parser = argparse.ArgumentParser(prog="rmpolar", description=__doc__)
    parser.add_argument("--version", action="version", version=ENGINE_VERSION)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (func, helptext) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.set_defaults(func=func)
        if name == "polar":
            sp.add_argument("--sorted", action="store_true", help="emit values sorted in decreasing order")
        if name == "decode":
            sp.add_argument("--code", default="twin", help="'twin' (default) or 'rm:<r>'")
            sp.add_argument("--frames", type=_pos_int, default=None, help="frames (default --samples)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.m is None:
        args.m = 8 if args.command == "reproduce-figures" else None
        if args.m is None:
            parser.error("--m is required")
    try:
        args.channel_obj = parse_channel(args.channel)
        return args.func(args)
    except ChannelSpecError as exc:
        print(f"rmpolar: channel parse error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, CapacityError) as exc:
        print(f"rmpolar: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
