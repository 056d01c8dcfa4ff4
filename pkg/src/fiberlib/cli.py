"""Command-line front end.

Exit codes: 0 success, 1 law or tolerance failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import io
from ._num import DEFAULT_TOL, dump_number
from .bundle import graded_representation, represent_module, represent_module_no_ac
from .embedding import embed_fiber
from .errors import FiberlibError
from .examples import divergence_value
from .lifting import lift_function
from .measure import pr_phi_function
from .modules import pullback_module
from .norms import from_json as norm_from_json

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _tol(args):
    return DEFAULT_TOL if args.tol is None else args.tol


def cmd_represent(args) -> int:
    M = io.presentation_from_json(io.read_json(args.input))
    tol = _tol(args)
    if args.method == "graded":
        G = graded_representation(M)
        io.write_json(G.to_json(), args.out)
        io.write_json({"max_defect": 0.0, "method": "graded"}, args.report)
        return EXIT_OK
    if args.method == "no-ac":
        R = represent_module_no_ac(M, args.K or M.gens)
    else:
        R = represent_module(M, depth=args.depth, resolution=args.net)
    out = R.bundle.to_json()
    out["measure"] = io.measure_to_json(M.measure)
    io.write_json(out, args.out)
    report = R.report.to_json()
    report["tol"] = tol
    io.write_json(report, args.report)
    return EXIT_OK if R.report.max_defect <= tol else EXIT_FAIL


def cmd_check(args) -> int:
    from .laws import run_suite

    res = run_suite(args.suite, seed=args.seed, cases=args.cases, fault=args.inject_fault)
    for r in res.results:
        print(f"{'PASS' if r.failed == 0 else 'FAIL'} {r.name}: {r.passed} passed, {r.failed} failed")
    failures = [r for r in res.results if r.failed]
    if failures:
        dump = {r.name: {"law": r.failure.law, "detail": r.failure.detail, "instance": r.failure.instance}
                for r in failures}
        if args.dump:
            io.write_json(dump, args.dump)
        else:
            print(json.dumps(dump, indent=2))
        return EXIT_FAIL
    return EXIT_OK


def _load_map(path):
    doc = io.read_json(path)
    m_x = io.measure_from_json(io._require(doc, "measure", "map file"))
    return io.map_from_json(doc, m_x.space), m_x


def cmd_prphi(args) -> int:
    if args.grow:
        rows = []
        for n in range(1, args.grow + 1):
            v = divergence_value(n)
            rows.append({"n": n, "pr_phi": dump_number(v)})
            print(f"n={n} Pr_phi(f_n)={v}")
        if args.out:
            io.write_json({"grow": rows}, args.out)
        return EXIT_OK if all(r["pr_phi"] == r["n"] for r in rows) else EXIT_FAIL
    if not args.map or not args.fn:
        raise io.InputError("prphi needs --map and --fn (or --grow)")
    phi, m_x = _load_map(args.map)
    f = io.function_from_json(io.read_json(args.fn), m_x)
    io.write_json(io.function_to_json(pr_phi_function(f, phi, m_x)), args.out)
    return EXIT_OK


def cmd_pullback(args) -> int:
    phi, m_x = _load_map(args.map)
    M = io.presentation_from_json(io.read_json(args.input))
    if M.measure.space != phi.target:
        phi = io.map_from_json({"assign": dict(phi.assignment)}, m_x.space, M.measure.space)
    io.write_json(io.presentation_to_json(pullback_module(phi, M, m_x)), args.out)
    return EXIT_OK


def cmd_lift(args) -> int:
    doc = io.read_json(args.input)
    m = io.measure_from_json(io._require(doc, "measure", "lift input"))
    f = io.function_from_json(io._require(doc, "function", "lift input"), m)
    L = io.lifting_from_json(doc.get("lifting"), m)
    out = lift_function(L, f)
    io.write_json({"values": {a: dump_number(v) for a, v in out.values.items()},
                   "lifting": io.lifting_to_json(L)}, args.out)
    return EXIT_OK


def cmd_embed(args) -> int:
    doc = io.read_json(args.input)
    fiber = norm_from_json(io._require(doc, "fiber", "embed input"))
    probes = doc.get("probes") or [[int(i == j) for i in range(fiber.dim)] for j in range(fiber.dim)]
    probes = [tuple(io.parse_number(t) for t in p) for p in probes]
    e = embed_fiber(fiber, probes, depth=args.depth, resolution=args.net)
    measured = max(e.measured_defect(p) for p in probes)
    out = {"ambient": {"depth": args.depth}, "epsilon": e.epsilon, "net_size": len(e.net),
           "net_kind": e.net.kind, "measured_defect": measured,
           "images": [e(p).tolist() for p in probes] if args.images else None}
    io.write_json(out, args.out)
    return EXIT_OK if e.epsilon <= _tol(args) else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(prog="fiberlib", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("represent", help="represent a module presentation as a bundle")
    r.add_argument("--input", required=True)
    r.add_argument("--depth", type=int, default=10)
    r.add_argument("--net", type=int, default=64, help="net resolution")
    r.add_argument("--tol", type=float)
    r.add_argument("--method", choices=("embed", "no-ac", "graded"), default="embed")
    r.add_argument("--K", type=int, help="truncation for --method no-ac")
    r.add_argument("--out", default="-")
    r.add_argument("--report", default="-")
    r.set_defaults(func=cmd_represent)

    c = sub.add_parser("check", help="run the law suites on seeded random instances")
    c.add_argument("--suite", default="all",
                   choices=("all", "measure", "lifting", "modules", "norms", "embedding", "bundle"))
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--cases", type=int, default=200)
    c.add_argument("--inject-fault", action="store_true", help="use a seminorm violating the triangle inequality")
    c.add_argument("--dump", help="write failing instances here instead of stdout")
    c.set_defaults(func=cmd_check)

    q = sub.add_parser("prphi", help="projection operator Pr_phi on functions")
    q.add_argument("--map")
    q.add_argument("--fn")
    q.add_argument("--grow", type=int, help="run the divergence example for n = 1..GROW")
    q.add_argument("--out")
    q.set_defaults(func=cmd_prphi)

    b = sub.add_parser("pullback", help="pull back a presentation along a map")
    b.add_argument("--map", required=True)
    b.add_argument("--input", required=True)
    b.add_argument("--out", default="-")
    b.set_defaults(func=cmd_pullback)

    lf = sub.add_parser("lift", help="lift a function class to a total function")
    lf.add_argument("--input", required=True)
    lf.add_argument("--out", default="-")
    lf.set_defaults(func=cmd_lift)

    e = sub.add_parser("embed", help="embed a fiber into C(Delta_d)")
    e.add_argument("--input", required=True)
    e.add_argument("--depth", type=int, default=10)
    e.add_argument("--net", type=int, default=64)
    e.add_argument("--tol", type=float)
    e.add_argument("--images", action="store_true", help="include the embedded probe vectors")
    e.add_argument("--out", default="-")
    e.set_defaults(func=cmd_embed)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "tol", None) is not None and args.tol <= 0:
        parser.error("--tol must be positive")
    if getattr(args, "cases", 1) < 1:
        parser.error("--cases must be at least 1")
    try:
        return args.func(args)
    except (FiberlibError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
