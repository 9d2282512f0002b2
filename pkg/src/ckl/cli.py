"""Command line entry point ``ckl``.

Exit codes: 0 everything passes, 1 an inequality or identity fails,
2 usage or data error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .catalog import (
    ALL_METHODS,
    EXAMPLE_NAMES,
    VerifyConfig,
    appendix_identity_check,
    load_example,
    load_tait,
    run_report,
    tait_names,
)
from .kasteleyn import assign_kasteleyn_signs, char_poly
from .mahler import mahler_jensen, mahler_quadrature
from .periodic_graph import GraphError, load_graph
from .spanning_tree import DEFAULT_SCHEDULE, tree_entropy_fd

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if len(vals) < 3 or min(vals) < 1:
        raise argparse.ArgumentTypeError("need at least three positive sizes")
    return vals


def _methods(text: str) -> tuple[str, ...]:
    vals = tuple(x.strip() for x in text.split(",") if x.strip())
    bad = [m for m in vals if m not in ALL_METHODS]
    if bad or not vals:
        raise argparse.ArgumentTypeError(f"methods must be a subset of {','.join(ALL_METHODS)}")
    return vals


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_list(args) -> int:
    for name in EXAMPLE_NAMES:
        ex = load_example(name)
        tpm = ex.expected_value("two_pi_M")
        vol = ex.expected_value("vol_bipyramid")
        print(f"{name:20s} tait={ex.tait_graph.name:20s} isoradial={'yes' if ex.isoradial else 'no ':3s} "
              f"2piM~{tpm:.6f}" + (f" vol~{vol:.4f}" if vol is not None else ""))
    return EXIT_OK


def cmd_verify(args) -> int:
    selection = list(EXAMPLE_NAMES) if args.all else args.example
    config = VerifyConfig(methods=args.methods, grid=args.grid, n_schedule=args.n_schedule)
    code, text = run_report(selection, args.format, args.out, config, appendix=args.all)
    if args.out is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {args.out}: {'all pass' if code == EXIT_OK else 'FAILURES'}")
    return code


def cmd_mahler(args) -> int:
    with open(args.graph) as fh:
        G = load_graph(fh.read())
    P = char_poly(G, assign_kasteleyn_signs(G))
    j = mahler_jensen(P)
    q = mahler_quadrature(P, args.grid)
    _dump({"graph": G.name, "jensen": j.to_dict(), "quadrature": q.to_dict(), "char_poly": P.to_dict()})
    return EXIT_OK


def cmd_trees(args) -> int:
    if args.graph:
        with open(args.graph) as fh:
            T = load_graph(fh.read())
    else:
        T = load_tait(args.lattice)
    ent = tree_entropy_fd(T, args.n_schedule)
    _dump({"lattice": T.name, **ent.to_dict()})
    return EXIT_OK


def cmd_appendix(args) -> int:
    rep = appendix_identity_check(args.tol)
    _dump(rep)
    return EXIT_OK if rep["pass"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ckl", description="Mahler measure vs bipyramid volume for toroidal links.")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list catalog examples").set_defaults(func=cmd_list)

    v = sub.add_parser("verify", help="verify the inequality for catalog examples")
    which = v.add_mutually_exclusive_group(required=True)
    which.add_argument("--example", action="append", choices=EXAMPLE_NAMES, metavar="NAME")
    which.add_argument("--all", action="store_true")
    v.add_argument("--methods", type=_methods, default=ALL_METHODS)
    v.add_argument("--grid", type=int, default=128)
    v.add_argument("--n-schedule", type=_int_list, default=DEFAULT_SCHEDULE)
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("mahler", help="Mahler measure of a dimer graph file")
    m.add_argument("--graph", required=True)
    m.add_argument("--grid", type=int, default=128)
    m.set_defaults(func=cmd_mahler)

    t = sub.add_parser("trees", help="spanning tree entropy of a lattice")
    src = t.add_mutually_exclusive_group(required=True)
    src.add_argument("--lattice", choices=tait_names(), metavar="NAME")
    src.add_argument("--graph")
    t.add_argument("--n-schedule", type=_int_list, default=DEFAULT_SCHEDULE)
    t.set_defaults(func=cmd_trees)

    a = sub.add_parser("appendix-check", help="check the dilogarithm identities for 4.8.8")
    a.add_argument("--tol", type=float, default=1e-9)
    a.set_defaults(func=cmd_appendix)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    grid = getattr(args, "grid", None)
    if grid is not None and grid < 4:
        parser.error("--grid must be at least 4")
    try:
        return args.func(args)
    except (GraphError, ValueError, ArithmeticError, MemoryError, OSError) as exc:
        print(f"ckl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
