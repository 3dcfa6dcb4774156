"""Command-line entry point.

Exit codes: 0 feasible / result matches, 1 infeasible / mismatch, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import search
from .arrays import ArrayError, DomainError, parse_array
from .constraints import ConstraintError
from .feasibility import DEFAULT_CONFIG, FilterConfig, gate
from .graphs import EdgeListError, build, certify_drg, read_edge_list, write_edge_list
from .spectral import integral_value, spectrum

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _config(args) -> FilterConfig:
    disabled = set(getattr(args, "disable", None) or ())
    unknown = disabled - set(FilterConfig.names())
    if unknown:
        raise DomainError(f"unknown filter(s): {', '.join(sorted(unknown))}")
    if getattr(args, "core_only", False):
        return FilterConfig.core_only()
    return DEFAULT_CONFIG.replace(**{name: False for name in disabled})


def cmd_check(args) -> int:
    arr = parse_array(args.array)
    report = gate(arr, _config(args))
    _emit(report.to_json())
    return EXIT_OK if report.feasible else EXIT_FAIL


def _spectrum_json(arr):
    sp = spectrum(arr)
    return {
        "eigenvalues": [t.to_json() for t in sp.eigenvalues],
        "multiplicities": [
            n if (n := integral_value(m)) is not None else f"~{float(m):.9g}" for m in sp.multiplicities
        ],
    }


def cmd_reproduce(args) -> int:
    name = args.name
    jobs = args.jobs
    if name == "theorem6":
        eps = Fraction(args.epsilon)
        res = search.verify_theorem6(eps, args.kmax if args.kmax is not None else 80, kmin=args.kmin, jobs=jobs)
        _emit(res.to_json())
        return EXIT_OK if not res.violations else EXIT_FAIL
    if name == "conjecture-a":
        res = search.verify_conjecture_a(args.kmax if args.kmax is not None else 40, jobs=jobs)
        out = res.to_json()
        out["checked_count"] = len(res.checked)
        _emit(out)
        return EXIT_OK if not res.violations else EXIT_FAIL
    base = {"s1": search.S1_SPEC, "s2": search.S2_SPEC, "s3": search.S3_SPEC, "s4": search.S4_SPEC}[name]
    spec = search.dataclasses.replace(base.with_range(kmin=args.kmin, kmax=args.kmax), config=_config(args))
    res = search.enumerate_d3(spec, jobs=jobs)
    expected = [a for a in search.EXPECTED[name] if spec.kmin <= parse_array(a).k <= spec.kmax]
    if args.out:
        res.write(args.out)
    summary = res.summary()
    summary["expected"] = expected
    summary["match"] = res.arrays() == expected
    _emit(summary)
    return EXIT_OK if summary["match"] else EXIT_FAIL


def cmd_graph(args) -> int:
    g = build(args.family, *args.params)
    out = {"family": args.family, "params": args.params, "n": g.n, "edges": len(g.edges())}
    code = EXIT_OK
    if args.certify:
        outcome = certify_drg(g)
        out["certification"] = outcome.to_json()
        if outcome.ok:
            out["spectrum"] = _spectrum_json(outcome.array)
        else:
            code = EXIT_FAIL
    if args.out:
        write_edge_list(g, args.out)
    _emit(out)
    return code


def cmd_certify(args) -> int:
    g = read_edge_list(args.input)
    outcome = certify_drg(g)
    out = {"n": g.n, "edges": len(g.edges()), "certification": outcome.to_json()}
    if outcome.ok:
        out["spectrum"] = _spectrum_json(outcome.array)
    _emit(out)
    return EXIT_OK if outcome.ok else EXIT_FAIL


def cmd_enumerate(args) -> int:
    spec = search.SearchSpec(
        name="enumerate",
        D=args.D,
        kmin=args.kmin,
        kmax=args.kmax,
        constraints=tuple(args.constraint or ()),
        config=_config(args),
    )
    res = search.enumerate_arrays(spec, jobs=args.jobs)
    if args.out:
        res.write(args.out)
        _emit(res.summary())
    else:
        for line in res.jsonl_lines():
            sys.stdout.write(line + "\n")
    return EXIT_OK


def _filter_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--disable", action="append", metavar="FILTER", help="turn off a named filter (repeatable)")
    p.add_argument("--core-only", action="store_true", help="run only the four core conditions")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="drgfeas", description="Feasibility of distance-regular graph intersection arrays.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run the feasibility gate on one array")
    p.add_argument("array", help='array as "b0,...,b_{D-1};c1,...,cD"')
    _filter_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reproduce", help="rerun one of the published searches")
    p.add_argument("name", choices=["s1", "s2", "s3", "s4", "theorem6", "conjecture-a"])
    p.add_argument("--kmin", type=int, default=None)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--epsilon", default="1/2", help="theorem6 only (default 1/2)")
    p.add_argument("--out", help="JSONL path for survivors; a .summary.json is written beside it")
    p.add_argument("--jobs", type=int, default=1)
    _filter_flags(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("graph", help="build a named graph")
    p.add_argument("family")
    p.add_argument("params", nargs="*", type=int)
    p.add_argument("--certify", action="store_true")
    p.add_argument("--out", help="write the edge list here")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("certify", help="certify an edge-list file")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("enumerate", help="list feasible arrays in a valency range")
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--kmin", type=int, default=2)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--constraint", action="append", help='e.g. "a1 >= k/2 - 1" (repeatable)')
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    _filter_flags(p)
    p.set_defaults(func=cmd_enumerate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ArrayError, DomainError, ConstraintError, EdgeListError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
