"""Command line front end.

Exit codes: 0 success / yes, 1 no / negative verdict, 2 unknown,
3 usage or input error, 4 numeric or size budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .errors import BudgetError, GraphError, ParseError
from .gallery import GALLERY, gallery_graph
from .graph_io import load_graph, parse_graph, render_graph, save_graph, to_dot
from .graphs import (
    LabeledDigraph,
    check_assumption1,
    find_isomorphism,
    is_path_complete,
    is_sink_free,
    is_source_free,
    is_strongly_connected,
    node_key,
    render_node,
    shortest_unreadable_word,
)
from .lifts import bwd_comp_lift, comp_lift_union, fwd_comp_lift, sum_lift, transitive_comp_lift
from .lmi import load_matrix_set, rho_upper, save_certificate
from .simulation import find_simulation, simulates_comp_lift, simulates_sum_lift

EXIT_OK = 0
EXIT_NO = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 3
EXIT_BUDGET = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise SystemExit2(message)


class SystemExit2(Exception):
    pass


def resolve_graph(ref: str) -> LabeledDigraph:
    """A graph reference: 'gallery:<name>', '-' for stdin, or a file path."""
    if ref.startswith("gallery:"):
        return gallery_graph(ref.split(":", 1)[1])
    if ref == "-":
        return parse_graph(sys.stdin.read(), source="<stdin>")
    return load_graph(ref)


def _emit(doc: dict, as_json: bool, human_lines) -> None:
    if as_json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for line in human_lines:
            print(line)


def _witness_doc(witness) -> dict:
    return {render_node(a): render_node(b) for a, b in witness.mapping}


def _cmd_check(args) -> int:
    g = resolve_graph(args.graph)
    missing = shortest_unreadable_word(g)
    pc = missing is None
    doc = {
        "path_complete": pc,
        "strongly_connected": is_strongly_connected(g),
        "sink_free": is_sink_free(g),
        "source_free": is_source_free(g),
    }
    lines = [
        f"path-complete: {str(pc).lower()}",
    ]
    if not pc:
        doc["unreadable_word"] = "".join(missing)
        lines.append(f"unreadable-word: {''.join(missing)}")
    lines += [
        f"strongly-connected: {str(doc['strongly_connected']).lower()}",
        f"sink-free: {str(doc['sink_free']).lower()}",
        f"source-free: {str(doc['source_free']).lower()}",
    ]
    if pc:
        report = check_assumption1(g)
        doc["assumption1"] = report.ok
        lines.append(f"assumption1: {str(report.ok).lower()}")
        if report.redundant_edge is not None:
            e = report.redundant_edge
            doc["redundant_edge"] = [render_node(e.src), render_node(e.dst), e.label]
            lines.append(
                f"redundant-edge: {render_node(e.src)} {render_node(e.dst)} {e.label}"
            )
    _emit(doc, args.json, lines)
    return EXIT_OK if pc else EXIT_NO


def _cmd_lift(args) -> int:
    g = resolve_graph(args.graph)
    epsilon = ()
    if args.kind == "sum":
        lifted = sum_lift(g, args.t)
    elif args.kind == "fwd":
        lifted = fwd_comp_lift(g, args.t)
    elif args.kind == "bwd":
        lifted = bwd_comp_lift(g, args.t)
    elif args.kind == "union":
        lifted = comp_lift_union(g, args.t)
    else:
        trans = transitive_comp_lift(g, args.t)
        lifted, epsilon = trans.graph, trans.epsilon_edges
    text = to_dot(lifted, epsilon_edges=epsilon) if args.dot else render_graph(lifted)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    g1 = resolve_graph(args.g1)
    g2 = resolve_graph(args.g2)
    if args.via is None:
        witness = find_simulation(g1, g2)
        if witness is None:
            _emit({"verdict": "no"}, args.json, ["no: no simulation map exists"])
            return EXIT_NO
        doc = {"verdict": "yes", "level": 0, "witness": _witness_doc(witness)}
        lines = ["yes"] + [f"  {render_node(a)} -> {render_node(b)}" for a, b in witness.mapping]
        _emit(doc, args.json, lines)
        return EXIT_OK
    if args.via == "comp":
        verdict = simulates_comp_lift(g1, g2, args.tmax)
    elif args.via == "sum":
        verdict = simulates_sum_lift(g1, g2, args.tmax)
    else:
        witness = find_simulation(transitive_comp_lift(g1, args.tmax).graph, g2)
        if witness is None:
            doc = {"verdict": "unknown", "tmax": args.tmax}
            _emit(doc, args.json, [f"unknown: no witness within transitive depth {args.tmax}"])
            return EXIT_UNKNOWN
        doc = {"verdict": "yes", "level": args.tmax, "witness": _witness_doc(witness)}
        lines = [f"yes (transitive closure at depth {args.tmax})"]
        lines += [f"  {render_node(a)} -> {render_node(b)}" for a, b in witness.mapping]
        _emit(doc, args.json, lines)
        return EXIT_OK
    if verdict.is_yes:
        doc = {
            "verdict": "yes",
            "level": verdict.level,
            "witness": _witness_doc(verdict.witness),
        }
        lines = [f"yes (depth {verdict.level})"]
        lines += [f"  {render_node(a)} -> {render_node(b)}" for a, b in verdict.witness.mapping]
        _emit(doc, args.json, lines)
        return EXIT_OK
    if verdict.is_no:
        _emit({"verdict": "no", "reason": verdict.reason}, args.json, [f"no: {verdict.reason}"])
        return EXIT_NO
    _emit(
        {"verdict": "unknown", "tmax": verdict.tmax},
        args.json,
        [f"unknown: exhausted depth budget {verdict.tmax}"],
    )
    return EXIT_UNKNOWN


def _cmd_iso(args) -> int:
    g1 = resolve_graph(args.g1)
    g2 = resolve_graph(args.g2)
    mapping = find_isomorphism(g1, g2)
    if mapping is None:
        _emit({"isomorphic": False}, args.json, ["not isomorphic"])
        return EXIT_NO
    pairs = sorted(mapping.items(), key=lambda kv: node_key(kv[0]))
    doc = {"isomorphic": True, "mapping": {render_node(a): render_node(b) for a, b in pairs}}
    _emit(doc, args.json, ["isomorphic"] + [
        f"  {render_node(a)} -> {render_node(b)}" for a, b in pairs
    ])
    return EXIT_OK


def _cmd_jsr(args) -> int:
    g = resolve_graph(args.graph)
    mats = load_matrix_set(args.matrices)
    result = rho_upper(g, mats, tol=args.tol, gamma=args.gamma)
    doc = {
        "r_lower": result.r_lower,
        "r_upper": result.r_upper,
        "iterations": result.bisection_iters,
        "tol": result.tol,
        "verify_margin": result.verify_margin,
        "beta_active": result.beta_active,
        "path_complete": is_path_complete(g),
    }
    lines = [
        f"r-lower: {result.r_lower:.6f}",
        f"r-upper: {result.r_upper:.6f}",
        f"iterations: {result.bisection_iters}",
        f"verify-margin: {result.verify_margin:.3e}",
    ]
    _emit(doc, args.json, lines)
    if args.cert_out:
        save_certificate(result, args.cert_out)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    from . import experiments  # deferred; pulls in the solver stack

    with open(args.config, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    pairs = []
    for item in raw["pairs"]:
        base = resolve_graph(item["base"])
        if "lift" in item:
            kind, t = item["lift"]["kind"], int(item["lift"]["t"])
            if kind == "fwd":
                other = fwd_comp_lift(base, t)
            elif kind == "bwd":
                other = bwd_comp_lift(base, t)
            elif kind == "sum":
                other = sum_lift(base, t)
            else:
                raise GraphError(f"unknown lift kind {kind!r} in config")
            other_ref = item.get("other_ref", f"{item['base']}^{kind}{t}")
        else:
            other = resolve_graph(item["other"])
            other_ref = item.get("other_ref", item["other"])
        pairs.append(
            experiments.GraphPair(
                name=item.get("name", item["base"]),
                base=base,
                other=other,
                base_ref=item.get("base_ref", item["base"]),
                other_ref=other_ref,
            )
        )
    config = experiments.ExperimentConfig(
        pairs=tuple(pairs),
        n=int(raw.get("n", 3)),
        samples=int(raw.get("samples", 1000)),
        seed=int(raw.get("seed", 0)),
        tol=float(raw.get("tol", 1e-4)),
        strict_margin=float(raw.get("strict_margin", 1e-3)),
        workers=int(raw.get("workers", 1)),
    )
    stats = experiments.run_comparison(config)
    stats_path = args.out_prefix + ".stats.json"
    csv_path = args.out_prefix + ".samples.csv"
    with open(stats_path, "w", encoding="utf-8") as fh:
        fh.write(stats.to_json() + "\n")
    stats.write_csv(csv_path)
    for p in stats.pairs:
        print(
            f"{p.name}: improved {p.improved}/{p.counted} "
            f"({100 * p.improved_fraction:.1f}%), mean gap {p.mean_gap_when_improved:.3f}"
        )
    print(f"excluded: {stats.excluded} ({100 * stats.excluded_fraction:.2f}%)"
          + ("" if stats.healthy else "  [UNHEALTHY]"))
    print(f"wrote {stats_path} and {csv_path}")
    return EXIT_OK


def _cmd_gallery(args) -> int:
    if not args.name:
        for name in sorted(GALLERY):
            entry = GALLERY[name]
            print(f"{name}: {entry.note}")
        return EXIT_OK
    g = gallery_graph(args.name)
    print(to_dot(g) if args.dot else render_graph(g), end="")
    return EXIT_OK


def _cmd_export_dot(args) -> int:
    g = resolve_graph(args.graph)
    print(to_dot(g), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pclift", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="path-completeness and structure checks")
    p.add_argument("graph", help="graph file, gallery:<name>, or - for stdin")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("lift", help="construct a lifted graph")
    p.add_argument("graph")
    p.add_argument("--kind", required=True, choices=["sum", "fwd", "bwd", "union", "trans"])
    p.add_argument("--t", type=int, required=True, help="lift depth")
    p.add_argument("--dot", action="store_true", help="emit DOT instead of graph text")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=_cmd_lift)

    p = sub.add_parser("simulate", help="search for a simulation of g2 by g1 (or its lifts)")
    p.add_argument("g1")
    p.add_argument("g2")
    p.add_argument("--via", choices=["sum", "comp", "trans"])
    p.add_argument("--tmax", type=int, default=3)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("iso", help="test label-preserving isomorphism")
    p.add_argument("g1")
    p.add_argument("g2")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_iso)

    p = sub.add_parser("jsr", help="certified joint-spectral-radius upper bound")
    p.add_argument("--graph", required=True)
    p.add_argument("--matrices", required=True, help="JSON matrix file")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--cert-out", help="write the certificate as JSON")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_jsr)

    p = sub.add_parser("experiment", help="run a seeded comparison experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out-prefix", default="experiment")
    p.set_defaults(fn=_cmd_experiment)

    p = sub.add_parser("gallery", help="list bundled graphs or print one")
    p.add_argument("name", nargs="?")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(fn=_cmd_gallery)

    p = sub.add_parser("export-dot", help="DOT rendering of a graph")
    p.add_argument("graph")
    p.set_defaults(fn=_cmd_export_dot)

    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except SystemExit as exc:  # argparse --help and friends
        return int(exc.code or 0)
    except SystemExit2 as exc:
        print(f"pclift: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"pclift: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GraphError as exc:
        print(f"pclift: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as exc:
        print(f"pclift: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except FileNotFoundError as exc:
        print(f"pclift: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
