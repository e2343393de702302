"""Command-line entry point: ``gkcheck <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .catalog import entry_names, get_entry, numeric_coframe_check
from .cohomology import CE_CAVEAT, betti_numbers, build_complex
from .curvature import levi_civita, ricci
from .groups import IntegerMatrix, abelianization, derived_subgroup_rank, inoue_lattice_presentation, \
    lattice_matrix_check
from .parser import ParseError, format_definition, parse_definition
from .pipeline import CHECKS, emit_report, verify_pipeline


def _load(target: str):
    if os.path.isfile(target):
        with open(target, encoding="utf-8") as fh:
            return parse_definition(fh.read())
    return get_entry(target)


def _parse_assign(text: str) -> dict[str, str]:
    out = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise ValueError(f"assignment {piece!r} must look like name=value")
        k, v = piece.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_list(args) -> int:
    for name in entry_names():
        if name == "family_n":
            print(f"{name:<10} torus bundle family, use family_<n> (dim 4 + 2n)")
            continue
        e = get_entry(name)
        g = e.algebra
        extras = []
        if e.plus is not None:
            extras.append("J+/J-")
        if e.metric is not None:
            extras.append("metric")
        if e.group is not None:
            extras.append("lattice")
        params = ", ".join(g.params) or "-"
        print(f"{name:<10} dim {g.dim}  params {params:<6} {' '.join(extras)}")
    return 0


def cmd_show(args) -> int:
    sys.stdout.write(format_definition(_load(args.target)))
    return 0


def cmd_verify(args) -> int:
    entry = _load(args.target)
    checks = None
    if args.checks is not None:
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    report = verify_pipeline(entry, checks, generic=args.generic)
    sys.stdout.write(emit_report(report, "machine" if args.machine else "human"))
    return 0 if report.passed else 1


def cmd_cohomology(args) -> int:
    entry = _load(args.target)
    cx = build_complex(entry.algebra, args.max_degree)
    betti = betti_numbers(cx)
    if args.machine:
        print(json.dumps({"entry": entry.name, "betti": betti, "caveat": CE_CAVEAT}))
    else:
        for k, b in enumerate(betti):
            print(f"b{k} = {b}")
        print(f"note: {CE_CAVEAT}")
    return 0


def cmd_ricci(args) -> int:
    entry = _load(args.target)
    geo = entry if args.generic else entry.at_point()
    if geo.metric is None:
        print(f"{entry.name}: no metric", file=sys.stderr)
        return 1
    ric = ricci(levi_civita(geo.algebra, geo.metric))
    b = geo.algebra.basis
    for i, row in enumerate(ric, 1):
        for j, c in enumerate(row, 1):
            if j >= i and not c.is_zero():
                print(f"Ric({b}_{i}, {b}_{j}) = {c}")
    return 0


def cmd_lattice(args) -> int:
    with open(args.matrix, encoding="utf-8") as fh:
        M = IntegerMatrix.parse(fh.read())
    rep = lattice_matrix_check(M)
    for line in rep.lines():
        print(line)
    if not rep.passes:
        return 1
    p = None if args.p == "none" else int(args.p)
    pres = inoue_lattice_presentation(M, p, args.blocks)
    ab = abelianization(pres)
    rank = derived_subgroup_rank(pres)
    if args.presentation:
        sys.stdout.write(pres.format())
    print(f"abelianization = {ab}")
    print(f"free rank = {ab.free_rank}")
    print(f"rank [G,G] = {rank}")
    print(f"generators = {len(pres.generators)}")
    return 0 if ab.free_rank + rank == len(pres.generators) else 1


def cmd_coframe(args) -> int:
    entry = _load(args.target)
    if entry.model is None:
        print(f"{entry.name}: no coordinate model", file=sys.stderr)
        return 1
    assign = _parse_assign(args.assign or "")
    dev = numeric_coframe_check(entry.model, entry.algebra, assign, args.samples, args.step, args.seed)
    half = numeric_coframe_check(entry.model, entry.algebra, assign, args.samples, args.step / 2, args.seed)
    ratio = dev / half if half else float("inf")
    print(f"max deviation (h = {args.step:g}) = {dev:.3e}")
    print(f"max deviation (h = {args.step / 2:g}) = {half:.3e}")
    print(f"ratio = {ratio:.3f}")
    return 0 if dev <= args.tolerance else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gkcheck",
                                 description="Exact verifier for generalized Kaehler structures on Lie algebras")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="list catalog entries")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("show", help="print an entry as a definition file")
    p.add_argument("target")
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("verify", help="run the verification pipeline")
    p.add_argument("target", help="catalog name or definition file")
    p.add_argument("--checks", help="comma-separated subset of: " + ", ".join(CHECKS))
    p.add_argument("--machine", action="store_true", help="emit a JSON report")
    p.add_argument("--generic", action="store_true", help="keep every parameter symbolic")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cohomology", help="Chevalley-Eilenberg Betti numbers")
    p.add_argument("target")
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--machine", action="store_true")
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("ricci", help="Ricci tensor of the entry's metric")
    p.add_argument("target")
    p.add_argument("--generic", action="store_true")
    p.set_defaults(func=cmd_ricci)

    p = sub.add_parser("lattice", help="check an integer matrix and the lattice it generates")
    p.add_argument("--matrix", required=True, help="file with a 3x3 integer matrix")
    p.add_argument("--p", default="4", choices=["2", "3", "4", "6", "none"], help="rotation order")
    p.add_argument("--blocks", type=int, default=1)
    p.add_argument("--presentation", action="store_true", help="print the presentation")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("coframe-check", help="finite-difference check of the coordinate coframe")
    p.add_argument("target")
    p.add_argument("--assign", default="", help="e.g. a=1,b=pi/2")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--step", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.set_defaults(func=cmd_coframe)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"gkcheck: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
