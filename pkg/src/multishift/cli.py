"""Command-line front end.

Subcommands: ``enumerate`` (weighted count tables), ``genfun`` (exact
counting series), ``perron`` (root, eigenvectors, entropy,
normalization), ``measure`` (cylinder measures by route), ``escape``
(hole avoidance counts and rates), and ``verify`` (the cross-validation
suite).  Reports are deterministic JSON (``--json``, the default) or
plain tables (``--table``) where applicable.

Exit codes: 0 ok, 1 verification failure, 2 bad spec, 3 budget
exceeded, 4 numeric failure, 5 I/O or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__, measures, spectral, verify
from .errors import BudgetError, MultishiftError, NumericError, SpecError
from .genfun import build_system, solve_generating_functions
from .langmodel import (DEFAULT_BUDGET, ShiftSpec, enumerate_slice, validate_spec,
                        weighted_count, weighted_count_ending_with,
                        weighted_count_forbidden_suffix)
from .ratfield import series_coeffs

EXIT_VERIFY = 1
EXIT_SPEC = 2
EXIT_BUDGET = 3
EXIT_NUMERIC = 4
EXIT_IO = 5


def load_spec_document(path: str) -> dict:
    """Read a spec JSON document from a path or stdin ('-')."""
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IOError(f"cannot read spec: {exc}") from exc


def spec_from_document(doc: dict) -> ShiftSpec:
    """Validate the JSON document shape and build the spec."""
    if not isinstance(doc, dict):
        raise SpecError("spec document must be a JSON object")
    allowed_keys = {"alphabet", "forbidden", "repeated", "expected", "name", "notes"}
    unknown = set(doc) - allowed_keys
    if unknown:
        raise SpecError(f"unknown spec keys: {sorted(unknown)}")
    alphabet = doc.get("alphabet")
    if not isinstance(alphabet, list) or not all(isinstance(s, str) and len(s) == 1
                                                 for s in alphabet):
        raise SpecError("alphabet must be a list of single-character symbols")
    forbidden = doc.get("forbidden", [])
    repeated = [(e["word"], e["multiplicity"]) for e in doc.get("repeated", [])]
    return validate_spec(alphabet, forbidden, repeated)


def parse_cylinder(text: str, spec: ShiftSpec) -> measures.Cylinder:
    """Cylinder syntax: either a plain symbol word (vertex form) or a
    comma/space separated chain of ``X*Y#j`` edge tokens."""
    tokens = [t for t in text.replace(",", " ").split() if t]
    if len(tokens) == 1 and "*" not in tokens[0]:
        return measures.Cylinder.from_vertex_word(spec.word(tokens[0]), spec.p)
    edges = []
    for tok in tokens:
        try:
            pair, branch = tok.split("#")
            x, y = pair.split("*")
        except ValueError as exc:
            raise SpecError(f"bad edge token {tok!r}; expected X*Y#j") from exc
        edges.append((spec.word(x), spec.word(y), int(branch)))
    return measures.Cylinder.from_edges(edges)


def report_skeleton(command: str, doc: dict) -> dict:
    return {"tool": f"multishift {__version__}", "command": command, "spec": doc}


def emit(report: dict, as_json: bool, table: str | None = None) -> None:
    if as_json or table is None:
        print(json.dumps(report, indent=2))
    else:
        print(table)


def cmd_enumerate(args, doc: dict, spec: ShiftSpec) -> int:
    n_max = args.max_n
    budget = args.budget
    table = {"n": list(range(0, n_max + 1)),
             "f": [weighted_count(n, spec, budget) for n in range(n_max + 1)]}
    table["g"] = {"".join(r): [weighted_count_ending_with(r, n, spec, budget)
                               for n in range(n_max + 1)] for r in spec.repeated_words}
    table["fa"] = {"".join(a): [weighted_count_forbidden_suffix(a, n, spec, budget)
                                for n in range(n_max + 1)] for a in spec.forbidden}
    if args.slices:
        table["slices"] = [enumerate_slice(n, spec, budget).to_json()
                           for n in range(1, n_max + 1)]
    report = report_skeleton("enumerate", doc)
    report["result"] = table
    if args.fmt == "table":
        lines = []
        heads = ["n", "f"] + [f"g[{k}]" for k in table["g"]] + [f"fa[{k}]" for k in table["fa"]]
        lines.append("  ".join(f"{h:>10}" for h in heads))
        for i, n in enumerate(table["n"]):
            row = [n, table["f"][i]] + [v[i] for v in table["g"].values()] \
                + [v[i] for v in table["fa"].values()]
            lines.append("  ".join(f"{x:>10}" for x in row))
        emit(report, False, "\n".join(lines))
    else:
        emit(report, True)
    return 0


def cmd_genfun(args, doc: dict, spec: ShiftSpec) -> int:
    system = build_system(spec)
    sol = solve_generating_functions(spec)
    result = {"system": system.to_json(), "solution": sol.to_json(),
              "series": [str(c) for c in series_coeffs(sol.all_words, args.series_n)]}
    if spec.union_reduced:
        from .genfun import constraint_correction
        result["correction"] = constraint_correction(spec).to_json()
    report = report_skeleton("genfun", doc)
    report["result"] = result
    emit(report, True)
    return 0


def cmd_perron(args, doc: dict, spec: ShiftSpec) -> int:
    report = report_skeleton("perron", doc)
    report["result"] = spectral.spectral_report(spec, args.allow_reducible)
    emit(report, True)
    return 0


def cmd_measure(args, doc: dict, spec: ShiftSpec) -> int:
    ctx = measures.MeasureContext(spec, args.allow_reducible)
    cyl = parse_cylinder(args.cylinder, spec)
    routes = (measures.EDGE_ROUTES if cyl.is_edge_form else measures.VERTEX_ROUTES) \
        if args.route == "all" else (args.route,)
    result = {"cylinder": cyl.to_json(),
              "measures": [measures.cylinder_measure(ctx, cyl, r).to_json() for r in routes]}
    vals = [float(m["value"]) for m in result["measures"]]
    result["max_route_gap"] = format(max(abs(a - b) for a in vals for b in vals), ".3g") \
        if len(vals) > 1 else "0"
    report = report_skeleton("measure", doc)
    report["result"] = result
    emit(report, True)
    return 0


def cmd_escape(args, doc: dict, spec: ShiftSpec) -> int:
    cyl = parse_cylinder(args.word, spec)
    if not cyl.is_edge_form:
        cyl = measures.Cylinder(cyl.vertices, (1,) * cyl.n_edges)
    rep = measures.escape_report(spec, cyl, args.max_n, args.budget, args.allow_reducible)
    report = report_skeleton("escape", doc)
    report["result"] = rep.to_json()
    emit(report, True)
    return 0


def cmd_verify(args, doc: dict, spec: ShiftSpec) -> int:
    rep = verify.run_verification(spec, args.max_n, args.budget,
                                  expected=doc.get("expected"),
                                  allow_reducible=args.allow_reducible)
    if args.fmt == "json":
        report = report_skeleton("verify", doc)
        report["result"] = rep.to_json()
        emit(report, True)
    else:
        for check in rep.checks:
            print(check.line())
    return 0 if rep.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multishift",
        description="Exact analysis of shift spaces with forbidden and repeated words.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, budget=True, default_fmt="json"):
        p.add_argument("--spec", required=True, help="spec JSON path, or - for stdin")
        grp = p.add_mutually_exclusive_group()
        grp.add_argument("--json", dest="fmt", action="store_const", const="json",
                         default=default_fmt)
        grp.add_argument("--table", dest="fmt", action="store_const", const="table")
        p.add_argument("--allow-reducible", action="store_true", default=False)
        if budget:
            p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    p = sub.add_parser("enumerate", help="weighted count tables from the oracle")
    common(p)
    p.add_argument("--max-n", type=int, default=10)
    p.add_argument("--slices", action="store_true", help="include full weighted slices")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("genfun", help="exact counting series and their system")
    common(p, budget=False)
    p.add_argument("--series-n", type=int, default=12)
    p.set_defaults(func=cmd_genfun)

    p = sub.add_parser("perron", help="root, eigenvectors, entropy, normalization")
    common(p, budget=False)
    p.set_defaults(func=cmd_perron)

    p = sub.add_parser("measure", help="cylinder measure by route")
    common(p, budget=False)
    p.add_argument("--cylinder", required=True,
                   help="vertex word, or edge chain like 00*00#1,00*01#1")
    p.add_argument("--route", default="all",
                   choices=("all",) + measures.EDGE_ROUTES + measures.VERTEX_ROUTES)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("escape", help="hole avoidance counts and escape rate")
    common(p)
    p.add_argument("--word", required=True, help="hole cylinder (same syntax as measure)")
    p.add_argument("--max-n", type=int, default=12)
    p.set_defaults(func=cmd_escape)

    p = sub.add_parser("verify", help="run the cross-validation suite")
    common(p, default_fmt="table")
    p.add_argument("--max-n", type=int, default=10)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = load_spec_document(args.spec)
        spec = spec_from_document(doc)
        return args.func(args, doc, spec)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except MultishiftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except IOError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
