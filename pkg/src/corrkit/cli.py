"""Command-line front end.

Exit status: 0 when every check passed, 1 when checks ran and some defect
exceeded the tolerance, 2 for usage or input errors.
"""
from __future__ import annotations

import argparse
import hashlib
import sys

import numpy as np

from . import __version__, formats
from .corr import correspondence_flags, detect_bimodule, jx, ker_phi, left_inner
from .errors import CorrkitError
from .fdalg import DEFAULT_TOL
from .fock import build_fock, covariance_profile, fock_dims, level_defect_table
from .graphalg import (
    check_ck_family,
    ck_relations,
    classify_vertices,
    graph_correspondence,
    graph_ideals,
    parse_graph,
)
from .rep import check_relative_covariance, verify_representation


class _Inputs:
    """Reads input files and remembers their digests for the report."""

    def __init__(self):
        self.digests = []

    def read(self, path: str) -> str:
        text = formats.read_text(path)
        self.digests.append({"path": path, "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest()})
        return text


def _blocks(ideal) -> list[int]:
    return ideal.sorted()


def _matrix_blocks(a) -> list:
    return [formats.encode_matrix(m) for m in a.data]


def cmd_analyze(args, inputs):
    x = formats.parse_correspondence(inputs.read(args.corr), args.corr)
    flags = correspondence_flags(x)
    lip = detect_bimodule(x)
    results = {
        "blocks": list(x.algebra.blocks),
        "fibers": list(x.fibers),
        "jx": _blocks(jx(x)),
        "ker_phi": _blocks(ker_phi(x)),
        "flags": {"faithful": flags.faithful, "nondegenerate": flags.nondegenerate, "full": flags.full},
        "bimodule": lip is not None,
    }
    if lip is not None and x.module.dim:
        rng = np.random.default_rng(args.seed)
        xi, eta = x.module.random_element(rng), x.module.random_element(rng)
        results["left_inner_sample"] = {
            "xi": _matrix_blocks(xi),
            "eta": _matrix_blocks(eta),
            "value": _matrix_blocks(left_inner(lip, xi, eta, args.tol)),
        }
    return results, 0


def cmd_graph(args, inputs):
    graph = parse_graph(inputs.read(args.graph), args.graph)
    results = {}
    if args.relations:
        results["relations"] = ck_relations(graph).splitlines()
    elif args.ideals:
        results["ideals"] = graph_ideals(graph).to_dict()
    elif args.to_corr:
        x = graph_correspondence(graph)
        with open(args.to_corr, "w", encoding="utf-8") as fh:
            fh.write(formats.dumps(formats.correspondence_to_dict(x)))
        results["written"] = args.to_corr
        results["vertex_order"] = list(graph.vertices)
    else:
        results["classification"] = classify_vertices(graph).to_dict()
        if args.classify is False:
            results["ideals"] = graph_ideals(graph).to_dict()
    return results, 0


def _rep_tables(r, ideal, tol):
    table = level_defect_table(r, tol)
    profile = covariance_profile(r, ideal)
    return table, profile


def cmd_fock(args, inputs):
    x = formats.parse_correspondence(inputs.read(args.corr), args.corr)
    if args.depth < 0:
        raise CorrkitError("--depth must be nonnegative")
    dims = fock_dims(x, args.depth)
    r = build_fock(x, args.depth)
    ideal = jx(x)
    table, profile = _rep_tables(r, ideal, args.tol)
    below = verify_representation(r, args.tol)
    results = {
        "dims": dims,
        "jx": _blocks(ideal),
        "axioms_below_cut": below.to_dict(),
        "level_defects": table.to_dict(),
        "jx_covariance": profile.to_dict(),
        "jx_covariance_vacuum_only": profile.contract_holds(args.tol),
    }
    if args.dump_rep:
        with open(args.dump_rep, "w", encoding="utf-8") as fh:
            fh.write(formats.dumps(formats.representation_to_dict(r)))
        results["written"] = args.dump_rep
    ok = below.ok and profile.contract_holds(args.tol)
    return results, 0 if ok else 1


def _parse_ideal(text: str, x):
    if text == "jx":
        return jx(x)
    if text == "none":
        return x.algebra.zero_ideal()
    try:
        members = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CorrkitError(f"--ideal expects 'jx', 'none' or comma-separated block indices, got {text!r}") from None
    return x.algebra.ideal(members)


def cmd_check_rep(args, inputs):
    x = formats.parse_correspondence(inputs.read(args.corr), args.corr)
    r = formats.parse_representation(inputs.read(args.rep), x, args.rep)
    ideal = _parse_ideal(args.ideal, x)
    axioms = verify_representation(r, args.tol)
    cov = check_relative_covariance(r, ideal, args.tol)
    results = {
        "ideal": _blocks(ideal),
        "axioms": axioms.to_dict(),
        "covariance": cov.to_dict(),
    }
    if r.levels is not None:
        table, profile = _rep_tables(r, ideal, args.tol)
        results["level_defects"] = table.to_dict()
        results["covariance_profile"] = profile.to_dict()
    return results, 0 if axioms.ok and cov.ok else 1


def cmd_check_ck(args, inputs):
    graph = parse_graph(inputs.read(args.graph), args.graph)
    _, projections, isometries = formats.parse_ck_family(inputs.read(args.family), args.family)
    report = check_ck_family(graph, projections, isometries, args.tol)
    return {"report": report.to_dict()}, 0 if report.ok else 1


def _render_text(obj, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for key in sorted(obj):
            value = obj[key]
            if isinstance(value, (dict, list)) and value and not _is_flat(value):
                lines.append(f"{pad}{key}:")
                lines.extend(_render_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar(value)}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, (dict, list)) and not _is_flat(item):
                lines.append(f"{pad}-")
                lines.extend(_render_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(item)}")
    else:
        lines.append(f"{pad}{_scalar(obj)}")
    return lines


def _is_flat(value) -> bool:
    return isinstance(value, list) and all(not isinstance(v, (dict, list)) for v in value)


def _scalar(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.6e}"
    if isinstance(value, list):
        return "[" + ", ".join(_scalar(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{}"
    return str(value)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help=f"defect tolerance (default {DEFAULT_TOL})")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized samples (default 0)")
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS, help="report format")

    parser = argparse.ArgumentParser(prog="corrkit", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=f"corrkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="J_X, kernel, flags and bimodule structure")
    p.add_argument("corr")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("graph", parents=[common], help="graph classification, ideals, relations")
    p.add_argument("graph")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--relations", action="store_true")
    group.add_argument("--ideals", action="store_true")
    group.add_argument("--classify", action="store_true", default=False)
    group.add_argument("--to-corr", metavar="OUT")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("fock", parents=[common], help="truncated Fock representation report")
    p.add_argument("corr")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--dump-rep", metavar="OUT")
    p.set_defaults(func=cmd_fock)

    p = sub.add_parser("check-rep", parents=[common], help="verify a representation file")
    p.add_argument("corr")
    p.add_argument("rep")
    p.add_argument("--ideal", default="jx", help="jx, none, or comma-separated block indices")
    p.set_defaults(func=cmd_check_rep)

    p = sub.add_parser("check-ck", parents=[common], help="verify a Cuntz-Krieger family")
    p.add_argument("graph")
    p.add_argument("family")
    p.set_defaults(func=cmd_check_ck)
    return parser


def dispatch(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    for name, default in (("tol", DEFAULT_TOL), ("seed", 0), ("format", "text")):
        if not hasattr(args, name):
            setattr(args, name, default)
    inputs = _Inputs()
    try:
        results, code = args.func(args, inputs)
    except CorrkitError as exc:
        print(f"corrkit {args.command}: error: {exc}", file=stderr)
        return 2
    except OSError as exc:
        print(f"corrkit {args.command}: error: {exc}", file=stderr)
        return 2
    report = {
        "tool": "corrkit",
        "version": __version__,
        "analysis": args.command,
        "inputs": inputs.digests,
        "parameters": {"tol": args.tol, "seed": args.seed},
        "results": results,
        "status": "pass" if code == 0 else "fail",
    }
    if args.format == "json":
        stdout.write(formats.dumps(report))
    else:
        stdout.write("\n".join(_render_text(report)) + "\n")
    return code


def main(argv=None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
