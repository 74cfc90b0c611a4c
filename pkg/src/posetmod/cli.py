"""Command-line front end.

Every command prints a JSON report on stdout and a short human summary on
stderr.  Exit codes: 0 success, 1 malformed input, 2 functoriality
violation, 3 local structure not stabilized, 4 inner-product structure
required but absent or violated.
"""

from __future__ import annotations

import argparse
import random
import sys
from typing import Sequence

from . import gallery, io
from .blocks import (
    barcode_1d,
    block_holonomy,
    enumerate_blocks,
    gbcd_vector,
    support_loops,
    tame_cover,
)
from .cmod import CModule, random_module, validate
from .errors import (
    CategoryError,
    FieldError,
    FormatError,
    InconsistentDims,
    IndefiniteGram,
    IpcConstructionFailed,
    NotProductOfChains,
    PathConflict,
    PosetModError,
    SimplicialError,
    DimensionMismatch,
)
from .ip import VERIFIED, WipStructure, check_ipc, construct_ip_persistence, obstruction_scan
from .linalg import GF, QQ
from .local import DEFAULT_MAX_ITERS, compute
from .multiflag import DEFAULT_FLAG_CAP
from .poset import chain, grid
from .simplicial import homology_functor, ipc_presentation

EXIT_OK, EXIT_INPUT, EXIT_CONFLICT, EXIT_CAP, EXIT_IPC = 0, 1, 2, 3, 4


class _Exit(Exception):
    def __init__(self, code: int, report: dict, summary: str):
        self.code, self.report, self.summary = code, report, summary


def _module(doc: io.Document) -> CModule:
    if doc.module is None:
        raise FormatError("this command needs a module (dims and matrices)")
    return doc.module


def _summary(m: CModule) -> dict:
    return {
        "field": m.field.describe(),
        "objects": list(m.category.objects),
        "dims": {x: m.dims[x] for x in m.category.objects},
        "hasse_edges": [list(e) for e in m.category.hasse_edges],
    }


def _local(m, t, args):
    ls = compute(m, t, args.max_iters, args.max_flag)
    rep = {
        "status": ls.status,
        "index": ls.index,
        "iterations": ls.iterations,
    }
    if not ls.stabilized:
        rep["reason"] = ls.reason
        rep["trace"] = [dict(s) for s in ls.trace]
        raise _Exit(
            EXIT_CAP,
            {"module": _summary(m), "local_structure": rep},
            f"local structure not stabilized: {ls.reason}",
        )
    rep["excess"] = {x: ls.excess_at(x) for x in m.category.objects}
    rep["total_excess"] = ls.total_excess
    rep["flag_sizes"] = ls.flags.sizes()
    return ls, rep


def _block_rows(blocks) -> list[dict]:
    return [{"support": list(b.key()), "dim": b.dim} for b in blocks]


def _grams(doc, m, args) -> dict | None:
    if doc.grams is not None:
        return doc.grams
    if getattr(args, "construct_ipc", False):
        try:
            w, _ = construct_ip_persistence(m, None, args.max_iters)
        except (IpcConstructionFailed, NotProductOfChains) as exc:
            raise _Exit(EXIT_IPC, {"ipc": {"verdict": "absent", "detail": str(exc)}}, str(exc))
        return dict(w.grams)
    return None


def _write_dot(args, m, blocks=()):
    if getattr(args, "dot", None):
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(m.category.to_dot([b.support.objects for b in blocks]))


# --------------------------------------------------------------------------
# commands


def cmd_validate(doc, args):
    if doc.module is None:
        rep = {"valid": True, "category": {"objects": list(doc.category.objects)}}
        if doc.diagram is not None:
            rep["diagram"] = True
        return rep, "valid diagram"
    m = doc.module
    validate(m)
    return {"valid": True, "module": _summary(m)}, f"valid module {m!r}"


def _tameness(ls, blocks, m):
    weakly = ls.total_excess == 0
    hol_free = True
    for b in blocks:
        if any(not op.is_identity() for op in block_holonomy(b)):
            hol_free = False
    return {"weakly_tame": weakly, "tame": weakly and hol_free, "holonomy_free_blocks": hol_free}


def cmd_analyze(doc, args):
    m = _module(doc)
    t = validate(m)
    ls, lrep = _local(m, t, args)
    report = {"module": _summary(m), "local_structure": lrep}
    blocks = []
    try:
        blocks = enumerate_blocks(ls)
        report["blocks"] = _block_rows(blocks)
        report["gbcd"] = [{"support": list(k), "dim": v} for k, v in gbcd_vector(ls).items()]
        report["tameness"] = _tameness(ls, blocks, m)
    except InconsistentDims as exc:
        report["blocks"] = None
        report["block_error"] = str(exc)
    if m.field.is_rational:
        grams = doc.grams
        if grams is not None:
            r = check_ipc(m, t, grams)
            report["ipc"] = {"verdict": r.verdict, "detail": r.describe(), "source": "input grams"}
        elif blocks:
            r = obstruction_scan(ls)
            report["ipc"] = {"verdict": r.verdict, "detail": r.describe(), "source": "obstruction scan"}
            if r.operator is not None:
                report["ipc"]["operator"] = io.to_plain(r.operator)
                report["ipc"]["loop"] = r.loop.vertices
    if m.category.is_chain():
        report["barcode"] = [list(b) for b in barcode_1d(m, t, args.max_iters).bars]
    _write_dot(args, m, blocks)
    nb = len(report["blocks"]) if report.get("blocks") is not None else "?"
    return report, f"stabilized at {ls.index}; e(M) = {ls.total_excess}; {nb} blocks"


def cmd_blocks(doc, args):
    m = _module(doc)
    t = validate(m)
    ls, _ = _local(m, t, args)
    try:
        blocks = enumerate_blocks(ls, doc.grams)
    except InconsistentDims as exc:
        raise _Exit(EXIT_INPUT, {"error": str(exc)}, str(exc))
    rows = []
    for b in blocks:
        row = {"support": list(b.key()), "dim": b.dim}
        row["transports"] = [
            {"src": x, "dst": y, "matrix": io.to_plain(a)} for (x, y), a in b.transports.items()
        ]
        row["holonomy"] = [io.to_plain(op) for op in block_holonomy(b)]
        rows.append(row)
    _write_dot(args, m, blocks)
    return {"blocks": rows}, f"{len(rows)} blocks"


def cmd_gbcd(doc, args):
    m = _module(doc)
    t = validate(m)
    ls, _ = _local(m, t, args)
    v = gbcd_vector(ls)
    return {"gbcd": [{"support": list(k), "dim": d} for k, d in v.items()]}, f"{len(v)} supports"


def cmd_tame_cover(doc, args):
    m = _module(doc)
    t = validate(m)
    ls, _ = _local(m, t, args)
    grams = _grams(doc, m, args)
    if grams is None:
        raise _Exit(EXIT_IPC, {"ipc": {"verdict": "absent"}}, "tame cover needs Grams (input or --construct-ipc)")
    r = check_ipc(m, t, grams)
    if r.verdict != VERIFIED:
        raise _Exit(EXIT_IPC, {"ipc": {"verdict": r.verdict, "detail": r.describe()}}, r.describe())
    cov = tame_cover(ls, WipStructure(grams))
    rep = {
        "blocks": _block_rows(cov.blocks),
        "cover_dims": {x: cov.cover.dims[x] for x in m.category.objects},
        "kernel_dims": dict(cov.kernel_dims),
        "total_kernel": cov.total_kernel,
        "total_excess": ls.total_excess,
        "isomorphism": cov.is_isomorphism(),
    }
    return rep, f"kernel total {cov.total_kernel}; isomorphism: {cov.is_isomorphism()}"


def cmd_barcode(doc, args):
    m = _module(doc)
    if not m.category.is_chain():
        raise FormatError("barcode needs a chain category")
    t = validate(m)
    bc = barcode_1d(m, t, args.max_iters)
    order = m.category.chain_order()
    return {"chain": order, "bars": [list(b) for b in bc.bars]}, f"{len(bc.bars)} bars"


def cmd_ip_check(doc, args):
    m = _module(doc)
    t = validate(m)
    if doc.grams is None:
        raise _Exit(EXIT_IPC, {"ipc": {"verdict": "absent"}}, "no grams in input")
    r = check_ipc(m, t, doc.grams, composites=args.composites)
    rep = {"verdict": r.verdict, "detail": r.describe(), "composites": args.composites}
    if r.edge is not None:
        rep["edge"] = list(r.edge)
        rep["witness"] = io.to_plain(r.witness)
        rep["values"] = io.to_plain(r.values)
    if r.verdict != VERIFIED:
        raise _Exit(EXIT_IPC, rep, r.describe())
    return rep, r.describe()


def cmd_ip_construct(doc, args):
    m = _module(doc)
    t = validate(m)
    try:
        w, strategy = construct_ip_persistence(m, t, args.max_iters, composites=args.composites)
    except IpcConstructionFailed as exc:
        raise _Exit(EXIT_IPC, {"verdict": "failed", "detail": str(exc)}, str(exc))
    return (
        {"strategy": strategy, "composites": args.composites, "grams": {x: io.to_plain(w[x]) for x in m.category.objects}},
        f"constructed by {strategy}",
    )


def cmd_obstruction(doc, args):
    m = _module(doc)
    t = validate(m)
    ls, _ = _local(m, t, args)
    r = obstruction_scan(ls)
    rep = {"verdict": r.verdict, "detail": r.describe()}
    if r.operator is not None:
        rep.update(operator=io.to_plain(r.operator), loop=r.loop.vertices, support=list(r.support))
    return rep, r.describe()


def _diagram(doc):
    if doc.diagram is None:
        raise FormatError("this command needs complexes and complex_maps")
    return doc.diagram


def cmd_homology(doc, args):
    d = _diagram(doc)
    m = homology_functor(d, args.degree, doc.field)
    return io.module_to_json(m), f"H_{args.degree}: {m!r}"


def cmd_present(doc, args):
    d = _diagram(doc)
    p = ipc_presentation(d, args.degree, doc.field)
    cat = d.category
    rep = {
        "cycles": io.module_to_json(p.cycles, p.cycle_grams if doc.field.is_rational else None),
        "boundaries": io.module_to_json(p.boundaries, p.boundary_grams if doc.field.is_rational else None),
        "inclusion": {x: io.to_plain(p.inclusion[x]) for x in cat.objects},
        "cokernel_dims": p.cokernel_dims(),
    }
    if doc.field.is_rational:
        rep["cycles_ipc"] = check_ipc(p.cycles, None, p.cycle_grams).verdict
        rep["boundaries_ipc"] = check_ipc(p.boundaries, None, p.boundary_grams).verdict
    return rep, f"cokernel dims {p.cokernel_dims()}"


def cmd_gallery(args):
    item = gallery.get(args.name)
    return io.module_to_json(item.module, None, item.diagram), f"{item.name}: {item.summary}"


def _shape(text: str):
    try:
        parts = tuple(int(p) for p in text.lower().split("x"))
    except ValueError:
        raise FormatError(f"shape {text!r} must look like 5, 3x3 or 2x2x2") from None
    if not parts or any(p < 1 for p in parts):
        raise FormatError(f"shape {text!r} must have positive sides")
    return chain(parts[0]) if len(parts) == 1 else grid(*parts)


def cmd_random(args):
    cat = _shape(args.shape)
    field = GF(args.p) if args.p else QQ
    m = random_module(cat, args.max_dim, args.seed, field)
    return io.module_to_json(m), f"random module {m!r}"


# --------------------------------------------------------------------------


FILE_COMMANDS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "blocks": cmd_blocks,
    "gbcd": cmd_gbcd,
    "tame-cover": cmd_tame_cover,
    "barcode": cmd_barcode,
    "ip-check": cmd_ip_check,
    "ip-construct": cmd_ip_construct,
    "obstruction": cmd_obstruction,
    "homology": cmd_homology,
    "present": cmd_present,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="posetmod", description="Structure of modules over finite posets.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in FILE_COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("file", help="JSON input ('-' for stdin)")
        s.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
        s.add_argument("--max-flag", type=int, default=DEFAULT_FLAG_CAP)
        s.add_argument("--dot", help="write the Hasse diagram (with block supports) as DOT")
        if name in ("ip-check", "ip-construct"):
            s.add_argument("--composites", action="store_true", help="check every comparable pair")
        if name == "tame-cover":
            s.add_argument("--construct-ipc", action="store_true", help="build Grams when the input has none")
        if name in ("homology", "present"):
            s.add_argument("--degree", type=int, default=1)
    g = sub.add_parser("gallery")
    g.add_argument("name", choices=gallery.NAMES)
    r = sub.add_parser("random")
    r.add_argument("shape", help="5 (chain), 3x3, 2x2x2, ...")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--max-dim", type=int, default=3)
    r.add_argument("--p", type=int, default=None, help="prime for F_p (default Q)")
    return p


def run(argv: Sequence[str]) -> tuple[int, dict, str]:
    args = build_parser().parse_args(list(argv))
    try:
        if args.command == "gallery":
            rep, msg = cmd_gallery(args)
        elif args.command == "random":
            rep, msg = cmd_random(args)
        else:
            doc = io.loads(sys.stdin.read()) if args.file == "-" else io.read(args.file)
            rep, msg = FILE_COMMANDS[args.command](doc, args)
        return EXIT_OK, rep, msg
    except _Exit as e:
        return e.code, e.report, e.summary
    except PathConflict as exc:
        return EXIT_CONFLICT, {"error": "path_conflict", "detail": str(exc)}, str(exc)
    except (FormatError, CategoryError, DimensionMismatch, SimplicialError, FieldError, IndefiniteGram, NotProductOfChains) as exc:
        return EXIT_INPUT, {"error": type(exc).__name__, "detail": str(exc)}, str(exc)
    except PosetModError as exc:
        return EXIT_INPUT, {"error": type(exc).__name__, "detail": str(exc)}, str(exc)


def main(argv: Sequence[str] | None = None) -> int:
    code, report, summary = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(io.dumps(report))
    sys.stderr.write(summary + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
