"""Command line front end: ``bohr-forge <command> [options]``.

Exit codes: 0 success, 1 a computational verdict failed, 2 usage error.
Floats are printed with 12 significant digits and exact rationals as "p/q".
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
import warnings
from fractions import Fraction

import numpy as np

from . import __version__
from .bohr import RegularityConfig, bohr_set, cutoff, stabilized_pair
from .certificate import check_certificate, dumps
from .chang import local_chang_cover
from .config import IterationConfig
from .errors import BohrForgeError, GroupSpecError
from .fourier import a_norm, convolve_measure, dft, indicator
from .groups import (
    CharacterSet,
    GroupSpec,
    as_fraction,
    format_element,
    generated_subgroup,
    parse_element,
    parse_group_spec,
    hex_to_set,
)
from .iteration import run_iteration
from .search import SCAN_HEADER, brute_force_min_anorm, nonempty_proper, obstruction_at_least, scan
from .structure import discrete_ivt, physical_estimate


class UsageError(Exception):
    pass


def _error_at(text: str, pos: int, message: str) -> UsageError:
    return UsageError(f"{message}\n  {text}\n  {' ' * pos}^ (column {pos + 1})")


_TOKEN = re.compile(r"\s*(\([^()]*\)|[^,()]+)\s*(,|$)")


def parse_set(G: GroupSpec, text: str) -> tuple[int, ...]:
    """Parse a set spec: ``all``, ``none``, ``interval:L``, ``subgroup:g1;g2``,
    ``random:k:seed``, a ``0x`` bitmask, or a comma list of flat indices and
    ``(a,b)`` coordinates."""
    text = text.strip()
    if text == "all":
        return tuple(range(G.order))
    if text in ("none", ""):
        return ()
    if text.startswith("0x"):
        try:
            return hex_to_set(G, text)
        except (ValueError, GroupSpecError) as exc:
            raise _error_at(text, 0, str(exc))
    head, _, rest = text.partition(":")
    if head == "interval":
        try:
            length = int(rest)
        except ValueError:
            raise _error_at(text, len(head) + 1, "interval length must be an integer")
        if not 0 <= length <= G.order:
            raise _error_at(text, len(head) + 1, f"interval length out of range 0..{G.order}")
        return tuple(range(length))
    if head == "subgroup":
        gens, pos = [], len(head) + 1
        for part in rest.split(";"):
            try:
                gens.append(parse_element(G, part))
            except (GroupSpecError, ValueError, IndexError) as exc:
                raise _error_at(text, pos, str(exc))
            pos += len(part) + 1
        return generated_subgroup(G, gens).indices
    if head == "random":
        parts = rest.split(":")
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise _error_at(text, len(head) + 1, "expected random:k:seed")
        k, seed = int(parts[0]), int(parts[1])
        if k > G.order:
            raise _error_at(text, len(head) + 1, f"k exceeds |G| = {G.order}")
        rng = np.random.default_rng(seed)
        return tuple(sorted(rng.choice(G.order, size=k, replace=False).tolist()))

    out, pos = set(), 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise _error_at(text, pos, "malformed element list")
        try:
            out.add(parse_element(G, m.group(1)))
        except (GroupSpecError, ValueError, IndexError) as exc:
            raise _error_at(text, m.start(1), str(exc))
        pos = m.end()
    return tuple(sorted(out))


def _num(x):
    """Round floats to 12 significant digits for printing."""
    if isinstance(x, float):
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def _emit(obj, args, out=None):
    text = json.dumps(_num(obj), indent=2, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        (out or sys.stdout).write(text)


def _frac(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _config(args) -> IterationConfig:
    reg = RegularityConfig(args.c_R, args.C_R)
    return IterationConfig(eps=args.eps, c_mass=args.c_mass, C_cmp=args.C_cmp,
                           c_chang=args.c_chang, round_cap=args.round_cap, regularity=reg)


def _group(args) -> GroupSpec:
    try:
        return parse_group_spec(args.group)
    except GroupSpecError as exc:
        raise UsageError(str(exc))


def _gamma(G, args) -> CharacterSet:
    return CharacterSet(G, parse_set(G, args.gamma) or (0,), role="frequency")


# -- commands ----------------------------------------------------------------


def cmd_anorm(args) -> int:
    G = _group(args)
    A = parse_set(G, args.set)
    f = indicator(G, A)
    report = {"group": str(G), "size": len(A), "a_norm": float(a_norm(G, f))}
    if args.table:
        report["abs_coefficients"] = np.abs(dft(G, f)).tolist()
    if args.quiet:
        print(f"{report['a_norm']:.12g}")
    else:
        _emit(report, args)
    return 0


def cmd_bohr(args) -> int:
    G = _group(args)
    B = bohr_set(_gamma(G, args), args.delta, RegularityConfig(args.c_R, args.C_R))
    _emit(B.to_json(), args)
    return 0


def cmd_ivt(args) -> int:
    G = _group(args)
    gamma = _gamma(G, args)
    A = parse_set(G, args.set)
    g = convolve_measure(G, indicator(G, A), cutoff(bohr_set(gamma, args.delta)))
    steps = bohr_set(gamma, args.step) if args.step else bohr_set(
        gamma, stabilized_pair(gamma, args.delta).delta3)
    x0, x1 = parse_element(G, args.x0), parse_element(G, args.x1)
    c = float(args.c) if args.c is not None else (g[x0] + g[x1]) / 2
    w = discrete_ivt(G, g, steps, x0, x1, c, float(args.eta))
    _emit({"x2": format_element(G.element(w.x2)), "value": w.value, "target": w.target,
           "bound": w.bound, "path": [format_element(G.element(p)) for p in w.path]}, args)
    return 0


def cmd_chang(args) -> int:
    G = _group(args)
    gamma = _gamma(G, args)
    A = parse_set(G, args.set)
    chi = indicator(G, A)
    f = chi - chi.mean()
    x = parse_element(G, args.x)
    B = bohr_set(gamma, args.delta)
    cover = local_chang_cover(G, f, B, args.eps, args.eta, _config(args), x)
    _emit(cover.to_json(), args)
    return 0


def cmd_estimate(args) -> int:
    G = _group(args)
    A = parse_set(G, args.set)
    est = physical_estimate(G, A, _gamma(G, args), args.delta, args.M, _config(args))
    _emit(est.to_json(), args)
    return 0


def cmd_iterate(args) -> int:
    G = _group(args)
    A = parse_set(G, args.set)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = run_iteration(G, A, args.M, _config(args))
    cert = res.to_certificate()
    report = check_certificate(cert, A)
    text = dumps(cert)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{report.verdict} rounds={len(res.rounds)} reason={res.reason} "
          f"bound={res.claimed_bound:.12g} a_norm={cert['a_norm']:.12g}", file=sys.stderr)
    return 0 if report.valid else 1


def cmd_certify(args) -> int:
    try:
        with open(args.cert) as fh:
            cert = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read certificate: {exc}")
    A = None
    if args.set is not None:
        A = parse_set(parse_group_spec(cert["group"]), args.set)
    report = check_certificate(cert, A)
    _emit(report.to_json(), args)
    return 0 if report.valid else 1


def _search_filter(G, text):
    kind, _, rest = text.partition(":")
    if kind == "nonempty":
        return nonempty_proper(G)
    if kind == "size":
        k = int(rest)
        return lambda n: n == k
    if kind == "obstruction":
        th, _, M = rest.partition(":")
        return obstruction_at_least(G, as_fraction(th), int(M) if M else G.order)
    raise UsageError(f"unknown filter {text!r}; use nonempty, size:k or obstruction:t[:M]")


def cmd_search(args) -> int:
    G = _group(args)
    res = brute_force_min_anorm(G, _search_filter(G, args.filter))
    _emit({"group": str(G), "filter": args.filter, "set": [format_element(G.element(i)) for i in res.indices],
           "bitmask": hex(res.bitmask) if res.candidates else None,
           "a_norm": res.value if res.candidates else None, "candidates": res.candidates}, args)
    return 0 if res.candidates else 1


def cmd_scan(args) -> int:
    G = _group(args)
    try:
        rows = scan(G, args.family, args.M or G.order, _config(args), certify=not args.no_certify)
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SCAN_HEADER)
        for r in rows:
            w.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in r.as_list()])
        text = buf.getvalue()
    else:
        text = json.dumps({"group": str(G), "family": args.family, "header": SCAN_HEADER,
                           "rows": [_num(r.as_list()) for r in rows]}, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    bad = [r for r in rows if not r.bound <= r.a_norm + 1e-9]
    return 1 if bad else 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bohr-forge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", default="Z16", help="e.g. Z16 or Z4xZ6")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    consts = argparse.ArgumentParser(add_help=False)
    consts.add_argument("--M", type=int, default=None)
    consts.add_argument("--eps", type=_frac, default=Fraction(1, 4))
    consts.add_argument("--c-mass", dest="c_mass", type=_frac, default=Fraction(1, 16))
    consts.add_argument("--C-cmp", dest="C_cmp", type=_frac, default=Fraction(16))
    consts.add_argument("--c-R", dest="c_R", type=_frac, default=Fraction(1, 16))
    consts.add_argument("--C-R", dest="C_R", type=_frac, default=Fraction(4))
    consts.add_argument("--c-chang", dest="c_chang", type=_frac, default=Fraction(1, 8))
    consts.add_argument("--round-cap", dest="round_cap", type=int, default=64)
    bohr_args = argparse.ArgumentParser(add_help=False)
    bohr_args.add_argument("--gamma", default="0", help="frequency set, same grammar as --set")
    bohr_args.add_argument("--delta", type=_frac, default=Fraction(1, 2))

    s = sub.add_parser("anorm", parents=[common], help="Wiener norm of an indicator")
    s.add_argument("--set", required=True)
    s.add_argument("--table", action="store_true", help="include |f^| for every character")
    s.add_argument("--quiet", "-q", action="store_true", help="print only the norm")
    s.set_defaults(func=cmd_anorm)

    s = sub.add_parser("bohr", parents=[common, bohr_args], help="dump a Bohr set")
    s.add_argument("--c-R", dest="c_R", type=_frac, default=Fraction(1, 16))
    s.add_argument("--C-R", dest="C_R", type=_frac, default=Fraction(4))
    s.set_defaults(func=cmd_bohr)

    s = sub.add_parser("ivt", parents=[common, bohr_args],
                       help="intermediate value witness for chi_A smoothed on B(gamma, delta)")
    s.add_argument("--set", required=True)
    s.add_argument("--x0", required=True)
    s.add_argument("--x1", required=True)
    s.add_argument("--c", type=float, default=None, help="target (default: midpoint)")
    s.add_argument("--eta", type=_frac, default=Fraction(1, 4))
    s.add_argument("--step", type=_frac, default=None, help="step radius (default: stabilised)")
    s.set_defaults(func=cmd_ivt)

    s = sub.add_parser("chang", parents=[common, bohr_args, consts],
                       help="local Chang cover of the balanced indicator")
    s.add_argument("--set", required=True)
    s.add_argument("--x", default="0")
    s.add_argument("--eta", type=_frac, default=Fraction(1, 4))
    s.set_defaults(func=cmd_chang)

    s = sub.add_parser("estimate", parents=[common, bohr_args, consts], help="physical-space estimate")
    s.add_argument("--set", required=True)
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("iterate", parents=[common, consts], help="run the iteration, write a certificate")
    s.add_argument("--set", required=True)
    s.set_defaults(func=cmd_iterate)

    s = sub.add_parser("certify", help="check a certificate file")
    s.add_argument("cert")
    s.add_argument("--set", default=None, help="optionally confirm the certified set")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("search", parents=[common], help="exhaustive minimum of the Wiener norm")
    s.add_argument("--filter", default="nonempty", help="nonempty | size:k | obstruction:t[:M]")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("scan", parents=[common, consts], help="norms and certified bounds over a family")
    s.add_argument("--family", default="intervals:1:8",
                   help="all-subsets | random:k:count:seed | intervals:lo:hi | none")
    s.add_argument("--format", choices=["json", "csv"], default="csv")
    s.add_argument("--no-certify", action="store_true", help="skip the iteration")
    s.set_defaults(func=cmd_scan)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "M", "absent") is None:
        try:
            args.M = parse_group_spec(args.group).order
        except GroupSpecError:
            pass
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bohr-forge {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except GroupSpecError as exc:
        print(f"bohr-forge {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except BohrForgeError as exc:
        print(f"bohr-forge {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
