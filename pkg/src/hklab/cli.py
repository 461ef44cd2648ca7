"""Experiment front end: grids over (p, n), disk caching, CSV/JSON export.

Exit codes: 0 success, 2 unparseable input (flags, ring/ideal specs,
config file), 3 matrix-size guard tripped, 1 mathematical failure
(non-primary ideal, singular curve, short profile, ...).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from hklab.colength import (
    IdealSpec,
    SizeGuardError,
    parse_ideal_spec,
)
from hklab.curves import (
    cohomology_profile,
    curve_geometry,
    estimate_hn_profile,
    vanishing_report,
)
from hklab.diagonal import (
    DiagonalSpec,
    diagonal_limits,
    diagonal_ring,
    g_value,
    sandwich_check,
)
from hklab.fp_linalg import is_prime
from hklab.graded import HypersurfaceRing, SpecParseError, parse_ring_spec
from hklab.limits import (
    ConvergenceRow,
    convergence_fit,
    hk_from_profile,
    rational_str,
    reference_value,
)
from hklab.store import ResultStore, cached_colength

COMMANDS = ("colength", "profile", "hn", "limits", "sandwich", "convergence", "gm")

_CONFIG_KEYS = {
    "ring": "ring",
    "ideal": "ideal",
    "family": "family",
    "primes": "primes",
    "n": "n_list",
    "m-max": "m_max",
    "out": "out",
    "cache": "cache",
    "jobs": "jobs",
    "cap": "cap",
    "d": "d",
}

_DEFAULTS = {
    "ring": None,
    "ideal": "maximal",
    "family": None,
    "primes": None,
    "n_list": "1",
    "m_max": None,
    "out": Path("."),
    "cache": None,
    "jobs": 1,
    "cap": 5000,
    "d": None,
}

_INT_KEYS = {"m_max", "jobs", "cap"}
_PATH_KEYS = {"out", "cache"}


def _add_common(sub: argparse.ArgumentParser) -> None:
    # defaults stay None here so a config file can tell "flag omitted" from
    # "flag set to the default value"; _finalize_defaults fills the gaps
    sub.add_argument("--config", type=Path, help="key=value file mirroring the flags")
    sub.add_argument("--ring", help="explicit ring spec, e.g. fermat:s=3,d=4,p=7")
    sub.add_argument("--ideal", help="'maximal' (default) or comma-joined generators")
    sub.add_argument(
        "--family",
        help="fermat-quartic | chang-quartic | diagonal:d1,..,ds | buchweitz-chen",
    )
    sub.add_argument("--primes", help="list '3,5,7', range '3..23', or '3..23%%8=1,7'")
    sub.add_argument("--n", dest="n_list", help="Frobenius exponents, e.g. '1,2' (default 1)")
    sub.add_argument("--m-max", dest="m_max", type=int, help="profile twist cutoff")
    sub.add_argument("--out", type=Path, help="output directory (default .)")
    sub.add_argument("--cache", type=Path, help="colength cache directory")
    sub.add_argument("--jobs", type=int, help="parallel (p,n) jobs (default 1)")
    sub.add_argument("--cap", type=int, help="matrix-size guard (default 5000)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hk-lab",
        description="Frobenius colengths, syzygy cohomology, and limit multiplicities",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = subs.add_parser(name)
        _add_common(sub)
        if name == "gm":
            sub.add_argument("--d", help="diagonal exponents, e.g. '4,4,4,4'")
    return parser


def load_config(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecParseError(f"cannot read config {path}: {exc}") from None
    mapping = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise SpecParseError(f"{path}:{lineno}: expected key=value")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise SpecParseError(f"{path}:{lineno}: unknown key {key!r}")
        mapping[_CONFIG_KEYS[key]] = value.strip()
    return mapping


def apply_config(args: argparse.Namespace, mapping: dict) -> None:
    """Config values fill in flags the command line left unset."""
    for dest, raw in mapping.items():
        if not hasattr(args, dest):
            raise SpecParseError(f"config key not valid for this command: {dest}")
        if getattr(args, dest) is not None:
            continue
        if dest in _INT_KEYS:
            try:
                value = int(raw)
            except ValueError:
                raise SpecParseError(f"config {dest}: expected integer, got {raw!r}") from None
        elif dest in _PATH_KEYS:
            value = Path(raw)
        else:
            value = raw
        setattr(args, dest, value)


def _finalize_defaults(args: argparse.Namespace) -> None:
    for dest, fallback in _DEFAULTS.items():
        if hasattr(args, dest) and getattr(args, dest) is None and fallback is not None:
            setattr(args, dest, fallback)


def parse_primes(text: str) -> List[int]:
    text = text.strip()
    try:
        if ".." in text:
            span, _, residue = text.partition("%")
            lo_s, _, hi_s = span.partition("..")
            lo, hi = int(lo_s), int(hi_s)
            allowed = None
            mod = 0
            if residue:
                mod_s, sep, keep = residue.partition("=")
                if not sep:
                    raise ValueError("residue filter needs mod=r1,r2")
                mod = int(mod_s)
                allowed = {int(r) % mod for r in keep.split(",")}
            primes = [
                p
                for p in range(max(2, lo), hi + 1)
                if is_prime(p) and (allowed is None or p % mod in allowed)
            ]
        else:
            primes = []
            for tok in text.split(","):
                v = int(tok)
                if not is_prime(v):
                    raise ValueError(f"not prime: {v}")
                primes.append(v)
    except ValueError as exc:
        raise SpecParseError(f"bad --primes {text!r}: {exc}") from None
    if not primes:
        raise SpecParseError(f"bad --primes {text!r}: empty prime set")
    return primes


def parse_n_list(text: str) -> List[int]:
    try:
        ns = [int(tok) for tok in text.split(",")]
    except ValueError:
        raise SpecParseError(f"bad --n {text!r}") from None
    if not ns or any(n < 1 for n in ns):
        raise SpecParseError(f"bad --n {text!r}: exponents must be >= 1")
    return ns


def parse_diagonal_family(text: str) -> DiagonalSpec:
    body = text.split(":", 1)[1]
    try:
        return DiagonalSpec(tuple(int(tok) for tok in body.split(",")))
    except ValueError as exc:
        raise SpecParseError(f"bad diagonal family {text!r}: {exc}") from None


def family_ring(family: str, p: int) -> HypersurfaceRing:
    if family == "fermat-quartic":
        return parse_ring_spec(f"fermat:s=3,d=4,p={p}")
    if family == "chang-quartic":
        return parse_ring_spec(f"fermat:s=4,d=4,p={p}")
    if family == "buchweitz-chen":
        return parse_ring_spec(f"hypersurface:s=3,p={p},f=x+y+z")
    if family.startswith("diagonal:"):
        return diagonal_ring(parse_diagonal_family(family), p)
    raise SpecParseError(f"unknown family {family!r}")


def resolve_ring(args: argparse.Namespace, p: int) -> HypersurfaceRing:
    if args.ring:
        ring = parse_ring_spec(args.ring)
        if ring.field.p != p:
            raise SpecParseError(
                f"--ring has characteristic {ring.field.p}, grid asked for {p}"
            )
        return ring
    if args.family:
        return family_ring(args.family, p)
    raise SpecParseError("need --ring or --family")


def grid_pairs(args: argparse.Namespace) -> List[Tuple[int, int]]:
    if args.primes:
        primes = parse_primes(args.primes)
    elif args.ring:
        primes = [parse_ring_spec(args.ring).field.p]
    else:
        raise SpecParseError("need --primes (or an explicit --ring)")
    ns = parse_n_list(args.n_list)
    return [(p, n) for p in primes for n in ns]


def run_grid(pairs: Sequence, worker, jobs: int) -> list:
    if jobs <= 1:
        return [worker(pair) for pair in pairs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, pairs))


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(path: Path, fieldnames: Sequence[str], rows: Sequence[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def _family_label(args: argparse.Namespace) -> str:
    return args.family if args.family else "custom"


def _store(args: argparse.Namespace) -> Optional[ResultStore]:
    return ResultStore(args.cache) if args.cache else None


# ------------------------------------------------------------------ commands


def cmd_colength(args: argparse.Namespace) -> int:
    pairs = grid_pairs(args)
    store = _store(args)

    def worker(pn):
        p, n = pn
        ring = resolve_ring(args, p)
        ideal = parse_ideal_spec(ring, args.ideal)
        return cached_colength(store, ring, ideal, p, n, max_dim=args.cap)

    records = run_grid(pairs, worker, args.jobs)
    label = _family_label(args)
    rows = [
        {
            "family": label,
            "p": rec.p,
            "n": rec.n,
            "q": rec.q,
            "m": m,
            "dim": dim,
        }
        for rec in records
        for m, dim in enumerate(rec.dims)
    ]
    write_csv(args.out / "colength.csv", ("family", "p", "n", "q", "m", "dim"), rows)
    write_json(
        args.out / "colength.json",
        {"family": label, "records": [rec.to_json_dict() for rec in records]},
    )
    for rec in records:
        print(
            f"p={rec.p} n={rec.n} q={rec.q} total={rec.total} "
            f"normalized={rational_str(rec.normalized)}"
        )
    return 0


def _curve_profile(args, p: int, n: int):
    ring = resolve_ring(args, p)
    ideal = parse_ideal_spec(ring, args.ideal)
    geom = curve_geometry(ring)
    prof = cohomology_profile(
        ring, ideal, p**n, m_max=args.m_max, max_dim=args.cap
    )
    return ring, ideal, geom, prof


def cmd_profile(args: argparse.Namespace) -> int:
    pairs = grid_pairs(args)
    results = run_grid(pairs, lambda pn: (pn, _curve_profile(args, *pn)), args.jobs)
    label = _family_label(args)
    rows = []
    payload = []
    for (p, n), (_, _, geom, prof) in results:
        for m in range(prof.m_max + 1):
            rows.append(
                {
                    "family": label,
                    "p": p,
                    "n": n,
                    "q": prof.q,
                    "m": m,
                    "h0": prof.h0[m],
                    "chi": prof.chi[m],
                    "h1": prof.h1[m],
                }
            )
        payload.append(
            {
                "p": p,
                "n": n,
                "q": prof.q,
                "m_max": prof.m_max,
                "geometry": {
                    "deg_y": geom.deg_y,
                    "genus": geom.genus,
                    "theta": geom.theta,
                },
                "h0": list(prof.h0),
                "chi": list(prof.chi),
                "h1": list(prof.h1),
            }
        )
    write_csv(
        args.out / "profile.csv",
        ("family", "p", "n", "q", "m", "h0", "chi", "h1"),
        rows,
    )
    write_json(args.out / "profile.json", {"family": label, "profiles": payload})
    for (p, n), (_, _, _, prof) in results:
        print(f"p={p} n={n} q={prof.q} m_max={prof.m_max}")
    return 0


def cmd_hn(args: argparse.Namespace) -> int:
    pairs = grid_pairs(args)

    def worker(pn):
        p, n = pn
        ring, ideal, geom, prof = _curve_profile(args, p, n)
        hn = estimate_hn_profile(prof, geom, ring.s, sum(ideal.degrees))
        report = vanishing_report(prof, hn, geom, p**n)
        return pn, hn, report

    results = run_grid(pairs, worker, args.jobs)
    label = _family_label(args)
    rows = []
    payload = []
    for (p, n), hn, report in results:
        for k, (nu, r) in enumerate(hn.pairs, start=1):
            rows.append(
                {
                    "family": label,
                    "p": p,
                    "n": n,
                    "q": p**n,
                    "k": k,
                    "nu": rational_str(nu),
                    "r": r,
                }
            )
        payload.append(
            {
                "p": p,
                "n": n,
                "q": p**n,
                "hn": hn.to_json_dict(),
                "vanishing": {
                    "below_violations": list(report.below_violations),
                    "above_violations": list(report.above_violations),
                    "tail_start": report.tail_start,
                    "tail_sum": report.tail_sum,
                    "tail_ratio": report.tail_ratio,
                },
            }
        )
    write_csv(
        args.out / "hn.csv", ("family", "p", "n", "q", "k", "nu", "r"), rows
    )
    write_json(args.out / "hn.json", {"family": label, "runs": payload})
    for (p, n), hn, report in results:
        steps = " ".join(f"({rational_str(nu)},{r})" for nu, r in hn.pairs)
        print(f"p={p} n={n} profile: {steps} clean={report.clean}")
    return 0


def cmd_limits(args: argparse.Namespace) -> int:
    if not args.family:
        raise SpecParseError("limits needs --family")
    if args.primes is None:
        raise SpecParseError("limits needs --primes")
    primes = parse_primes(args.primes)
    ns = parse_n_list(args.n_list)
    rows = []
    for p in primes:
        entry = {"p": p, "reference": rational_str(reference_value(args.family, p))}
        if args.family == "fermat-quartic":
            estimates = []
            for n in ns:
                ring, ideal, geom, prof = _curve_profile(args, p, n)
                hn = estimate_hn_profile(prof, geom, ring.s, sum(ideal.degrees))
                value = hk_from_profile(geom, hn, ideal.degrees)
                estimates.append(
                    {"n": n, "hk_from_profile": rational_str(value)}
                )
            entry["profile_estimates"] = estimates
        rows.append(entry)
    write_json(args.out / "limits.json", {"family": args.family, "rows": rows})
    for entry in rows:
        print(f"p={entry['p']} reference={entry['reference']}")
    return 0


def cmd_sandwich(args: argparse.Namespace) -> int:
    if not args.family or not args.family.startswith("diagonal:"):
        raise SpecParseError("sandwich needs --family diagonal:d1,..,ds")
    spec = parse_diagonal_family(args.family)
    pairs = grid_pairs(args)
    reports = run_grid(pairs, lambda pn: sandwich_check(spec, *pn), args.jobs)
    label = _family_label(args)
    rows = [
        {
            "family": label,
            "p": rep.p,
            "n": rep.n,
            "lower": rational_str(rep.lower),
            "value": rational_str(rep.value),
            "upper": rational_str(rep.upper),
            "gap": rational_str(rep.gap),
            "gap_p": rational_str(rep.gap_p),
            "lower_float": float(rep.lower),
            "value_float": float(rep.value),
            "upper_float": float(rep.upper),
        }
        for rep in reports
    ]
    write_csv(
        args.out / "sandwich.csv",
        (
            "family",
            "p",
            "n",
            "lower",
            "value",
            "upper",
            "gap",
            "gap_p",
            "lower_float",
            "value_float",
            "upper_float",
        ),
        rows,
    )
    write_json(
        args.out / "sandwich.json",
        {
            "family": label,
            "reports": [
                {
                    "p": rep.p,
                    "n": rep.n,
                    "lower": rational_str(rep.lower),
                    "value": rational_str(rep.value),
                    "upper": rational_str(rep.upper),
                    "gap": rational_str(rep.gap),
                    "gap_p": rational_str(rep.gap_p),
                }
                for rep in reports
            ],
        },
    )
    for rep in reports:
        print(
            f"p={rep.p} n={rep.n} {rational_str(rep.lower)} <= "
            f"{rational_str(rep.value)} <= {rational_str(rep.upper)}"
        )
    return 0


def cmd_convergence(args: argparse.Namespace) -> int:
    if not args.family:
        raise SpecParseError("convergence needs --family")
    pairs = grid_pairs(args)
    ns = {n for _, n in pairs}
    if len(ns) != 1:
        raise SpecParseError("convergence needs a single --n")
    store = _store(args)

    def worker(pn):
        p, n = pn
        ring = resolve_ring(args, p)
        ideal = parse_ideal_spec(ring, args.ideal)
        record = cached_colength(store, ring, ideal, p, n, max_dim=args.cap)
        return ConvergenceRow.build(
            p, n, record.normalized, reference_value(args.family, p)
        )

    rows = run_grid(pairs, worker, args.jobs)
    fit = convergence_fit(rows)
    csv_rows = []
    for row in rows:
        d = row.to_csv_dict()
        d["normalized_float"] = float(row.normalized)
        d["residual_float"] = float(row.residual)
        csv_rows.append(d)
    write_csv(
        args.out / "convergence.csv",
        (
            "p",
            "n",
            "q",
            "normalized",
            "reference",
            "residual",
            "residual_p",
            "normalized_float",
            "residual_float",
        ),
        csv_rows,
    )
    write_json(args.out / "convergence_fit.json", fit)
    for row in rows:
        print(
            f"p={row.p} n={row.n} normalized={rational_str(row.normalized)} "
            f"reference={rational_str(row.reference)} "
            f"residual_p={rational_str(row.residual_p)}"
        )
    print(f"e_hat={fit['e_hat']:.6f}")
    return 0


def cmd_gm(args: argparse.Namespace) -> int:
    if not args.d:
        raise SpecParseError("gm needs --d, e.g. --d 4,4,4,4")
    try:
        spec = DiagonalSpec(tuple(int(tok) for tok in args.d.split(",")))
    except ValueError as exc:
        raise SpecParseError(f"bad --d {args.d!r}: {exc}") from None
    limits = diagonal_limits(spec)
    gv = g_value([Fraction(1, d) for d in spec.exponents])
    payload = {
        "exponents": list(spec.exponents),
        "e_hk_infinity": rational_str(limits.e_hk_infinity),
        "e_naive": rational_str(limits.e_naive),
        "g": gv.to_json_dict(),
    }
    write_json(args.out / "gm.json", payload)
    print(
        f"e_hk_infinity={payload['e_hk_infinity']} e_naive={payload['e_naive']}"
    )
    return 0


_HANDLERS = {
    "colength": cmd_colength,
    "profile": cmd_profile,
    "hn": cmd_hn,
    "limits": cmd_limits,
    "sandwich": cmd_sandwich,
    "convergence": cmd_convergence,
    "gm": cmd_gm,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        if args.config is not None:
            apply_config(args, load_config(args.config))
        _finalize_defaults(args)
        return _HANDLERS[args.command](args)
    except SpecParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SizeGuardError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return 3
    except (ValueError, RuntimeError, ArithmeticError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
