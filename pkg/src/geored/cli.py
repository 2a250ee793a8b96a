"""``geored`` command line: reduce, solve, covers, verify, compose, counterexample, generate."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__, corpus
from .covers import BOOLEAN, GENERAL, cover_to_string, enumerate_covers, is_cover
from .csp import (
    DEFAULT_BUDGET,
    WEIGHTED_MAXSAT,
    BudgetExceeded,
    CspInstance,
    Graph,
    ParseError,
    csp_from_dict,
    csp_to_dict,
    parse_dimacs,
    parse_graph,
    serialize_dimacs,
    serialize_graph,
)
from .pls import AStarInstance
from .problems import problem
from .reductions import (
    EXACT_ONE,
    PAPER_NAE,
    REDUCTIONS,
    ColoringInstance,
    Reduction,
    _is_exactly_one,
    build_counterexample_phi1,
    compose,
    identity_reduction,
    phi2_claimed_cover,
    reduce_4sat_to_3sat,
)
from .verify import FAILS, NA, PARTIAL, REPORT_SCHEMA, CHECK_NAMES, emit_report, verify_reduction

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

GRAPH_SUFFIXES = {".col", ".edge", ".graph"}
DIMACS_SUFFIXES = {".cnf", ".wcnf"}
INSTANCE_SUFFIXES = GRAPH_SUFFIXES | DIMACS_SUFFIXES | {".json"}


class UsageError(Exception):
    pass


# -- loading and writing instances ------------------------------------------------------


def astar_to_dict(inst: AStarInstance) -> dict:
    return {
        "type": "astar",
        "formula": csp_to_dict(inst.base),
        "start": list(inst.start),
        "d": inst.d,
        "note": "d is the unary path bound, written in decimal",
    }


def astar_from_dict(d: dict) -> AStarInstance:
    return AStarInstance(csp_from_dict(d["formula"]), tuple(d["start"]), int(d["d"]))


def _first_content_line(text: str) -> str:
    for line in text.splitlines():
        s = line.strip()
        if s and not s.startswith("c"):
            return s
    return ""


def read_instance(path: Path) -> tuple[str, Any]:
    """Return ``(detected kind, object)`` for a graph, DIMACS or JSON file."""
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    head = _first_content_line(text)
    if path.suffix in GRAPH_SUFFIXES or head.startswith(("p edge", "p col")):
        return "graph", parse_graph(text)
    if path.suffix in DIMACS_SUFFIXES or head.startswith("p cnf") or head.startswith("p wcnf"):
        inst = parse_dimacs(text)
        return ("weighted-maxsat" if inst.kind == WEIGHTED_MAXSAT else "cnf"), inst
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not a graph, DIMACS or JSON file ({exc.msg})") from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a JSON object")
    try:
        if data.get("type") == "astar":
            return "astar", astar_from_dict(data)
        inst = csp_from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    if inst.kind == "counting-csp":
        return "counting-csp", inst
    if inst.is_cnf:
        return "cnf", inst
    if inst.domain.k == 2 and inst.constraints and all(_is_exactly_one(c) for c in inst.constraints):
        return "one-in-k", inst
    return "csp", inst


def as_kind(detected: str, obj: Any, kind: str, k: int | None) -> Any:
    """Coerce a loaded object to ``kind`` or raise naming the expected kind."""
    if kind == "kcol" and detected == "graph":
        return ColoringInstance(obj, k or 3)
    if kind == "pgb" and detected == "graph":
        return obj
    if kind == detected:
        return obj
    if kind == "csp" and isinstance(obj, CspInstance):
        return obj
    raise UsageError(f"expected a {kind} instance, got {detected}")


def instance_text(obj: Any) -> tuple[str, str]:
    """Serialized form and file suffix."""
    if isinstance(obj, Graph):
        return serialize_graph(obj), ".edge"
    if isinstance(obj, ColoringInstance):
        return serialize_graph(obj.graph), ".edge"
    if isinstance(obj, AStarInstance):
        return _dumps(astar_to_dict(obj)), ".json"
    if obj.is_cnf:
        return serialize_dimacs(obj), ".wcnf" if obj.kind == WEIGHTED_MAXSAT else ".cnf"
    return _dumps(csp_to_dict(obj)), ".json"


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_plain(v) for v in obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    return obj


def _dumps(data: Any) -> str:
    return json.dumps(_plain(data), sort_keys=True, indent=2) + "\n"


def _write(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text)


def _format_values(values, obj: Any) -> str:
    domain = getattr(obj, "domain", None)
    if domain is not None and domain.labels:
        return " ".join(domain.label(v) for v in values)
    return "".join(str(v) for v in values)


def _format_cover(sigma, obj: Any) -> str:
    try:
        return cover_to_string(sigma)
    except ValueError:
        domain = getattr(obj, "domain", None)
        label = domain.label if domain is not None else str
        return " ".join(",".join(label(v) for v in sorted(s)) for s in sigma)


# -- reductions -----------------------------------------------------------------------------


def build_reduction(name: str, variant: str | None) -> Reduction:
    if name not in REDUCTIONS:
        raise UsageError(f"unknown reduction {name!r}; choose from {', '.join(sorted(REDUCTIONS))}")
    if name == "oneink-ksat":
        return REDUCTIONS[name](variant or EXACT_ONE)
    if variant is not None:
        raise UsageError(f"{name} takes no --variant")
    return REDUCTIONS[name]()


def build_chain(names: list[str], variant: str | None) -> Reduction:
    if not names:
        raise UsageError("give at least one --reduction")
    if all(n == "identity" for n in names):
        raise UsageError("an identity needs a concrete reduction to take its kind from")
    concrete = [None if n == "identity" else build_reduction(n, variant) for n in names]
    # an identity takes the kind of the stage it feeds or follows
    for i, r in enumerate(concrete):
        if r is None:
            nxt = next((c for c in concrete[i + 1 :] if c), None)
            prev = next((c for c in reversed(concrete[:i]) if c), None)
            kind = nxt.source_kind if nxt else prev.target_kind
            concrete[i] = identity_reduction(kind)
    chain = concrete[0]
    for r in concrete[1:]:
        chain = compose(chain, r)
    return chain


def load_source(path: Path, R: Reduction, k: int | None) -> Any:
    detected, obj = read_instance(path)
    try:
        return as_kind(detected, obj, R.source_kind, k)
    except UsageError:
        raise UsageError(f"{R.name} expects a {R.source_kind} instance, but {path} holds a {detected} instance") from None


# -- commands -----------------------------------------------------------------------------------


def cmd_reduce(args) -> int:
    R = build_reduction(args.reduction, args.variant)
    x = load_source(Path(args.input), R, args.k)
    out = R.apply(x)
    text, suffix = instance_text(out.target)
    if args.output is None:
        sys.stdout.write(text)
        for note in out.notes:
            print(f"note: {note}", file=sys.stderr)
        return EXIT_OK
    dest = Path(args.output)
    dest.mkdir(parents=True, exist_ok=True)
    (dest / f"target{suffix}").write_text(text)
    prov = {"reduction": R.name, "source": args.input, "notes": list(out.notes), "map": out.provenance}
    (dest / "provenance.json").write_text(_dumps(prov))
    src = problem(R.source_kind)
    try:
        witnesses = src.witnesses(x, args.budget)
    except BudgetExceeded as exc:
        (dest / "witnesses.txt").write_text(f"# not enumerated: {exc}\n")
    else:
        rows = [f"{_format_values(y, x)} -> {''.join(map(str, R.g(out, y)))}" for y in witnesses]
        (dest / "witnesses.txt").write_text("".join(r + "\n" for r in rows))
    return EXIT_OK


def _listing_target(args) -> tuple[str, Any]:
    detected, obj = read_instance(Path(args.input))
    kind = args.kind or {"graph": "kcol", "weighted-maxsat": None}.get(detected, detected)
    if kind is None:
        raise UsageError("weighted formulas have no solution listing; wrap them as an astar instance")
    return kind, as_kind(detected, obj, kind, args.k)


def cmd_solve(args) -> int:
    kind, obj = _listing_target(args)
    sols = sorted(problem(kind).witnesses(obj, args.budget))
    view = obj.to_csp() if isinstance(obj, ColoringInstance) else obj
    _write("".join(_format_values(y, view) + "\n" for y in sols), args.output)
    print(f"{len(sols)} solutions", file=sys.stderr)
    return EXIT_OK


def cmd_covers(args) -> int:
    kind, obj = _listing_target(args)
    if args.predicate and isinstance(obj, CspInstance):
        found = enumerate_covers(obj, args.cover_budget, args.predicate)
    else:
        p = problem(kind)
        if p.covers is None:
            raise UsageError(f"{kind} instances have no cover enumeration")
        found = p.covers(obj, args.cover_budget)
    view = obj.to_csp() if isinstance(obj, ColoringInstance) else obj
    lines = sorted(_format_cover(s, view) for s in found)
    _write("".join(line + "\n" for line in lines), args.output)
    print(f"{len(lines)} covers", file=sys.stderr)
    return EXIT_OK


def _checks(args) -> list[str]:
    names = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = [c for c in names if c not in CHECK_NAMES]
    if unknown or not names:
        raise UsageError(f"--checks takes a comma list from {', '.join(CHECK_NAMES)}")
    return names


def _tolerance(args):
    if args.tolerance == "exact":
        return "exact"
    return None


def _instance_files(path: Path) -> list[Path]:
    if path.is_dir():
        files = sorted(p for p in path.rglob("*") if p.is_file() and p.suffix in INSTANCE_SUFFIXES)
        if not files:
            raise UsageError(f"no instance files under {path}")
        return files
    if not path.exists():
        raise UsageError(f"no such file: {path}")
    return [path]


def _run_verification(args, R: Reduction) -> int:
    checks = _checks(args)
    root = Path(args.input)
    files = _instance_files(root)
    reports = []
    for f in files:
        x = load_source(f, R, args.k)
        ident = f.relative_to(root).as_posix() if root.is_dir() else f.name
        reports.append(
            verify_reduction(
                R,
                x,
                checks,
                args.budget,
                args.cover_budget,
                args.target_cover_budget,
                _tolerance(args),
                args.c,
                instance_id=ident,
            )
        )
    if args.format == "csv":
        if len(reports) == 1:
            text = emit_report(reports[0], "csv")
        else:
            parts = []
            for i, rep in enumerate(reports):
                body = emit_report(rep, "csv").splitlines()
                parts += (["instance," + body[0]] if i == 0 else []) + [f"{rep.instance},{row}" for row in body[1:]]
            text = "\n".join(parts) + "\n"
    elif len(reports) == 1:
        text = emit_report(reports[0], "json")
    else:
        statuses: dict[str, dict[str, int]] = {}
        for rep in reports:
            for key, verdict in rep.properties.items():
                tally = statuses.setdefault(key, {})
                tally[verdict.status] = tally.get(verdict.status, 0) + 1
        bundle = {
            "schema": REPORT_SCHEMA,
            "tool_version": __version__,
            "reduction": R.name,
            "summary": statuses,
            "reports": [rep.to_dict() for rep in reports],
        }
        text = json.dumps(bundle, sort_keys=True, indent=2) + "\n"
    _write(text, args.output)
    bad = {FAILS} | ({PARTIAL, NA} if args.strict else set())
    failed = any(v.status in bad for rep in reports for v in rep.properties.values())
    for rep in reports:
        line = " ".join(f"{k}={v.status}" for k, v in rep.properties.items())
        print(f"{rep.instance}: {line}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_verify(args) -> int:
    return _run_verification(args, build_reduction(args.reduction, args.variant))


def cmd_compose(args) -> int:
    return _run_verification(args, build_chain(args.reduction, args.variant))


def cmd_counterexample(args) -> int:
    phi1 = build_counterexample_phi1()
    R, out = reduce_4sat_to_3sat(phi1)
    report = verify_reduction(R, phi1, ("wi",), args.budget, instance_id="phi1")
    phi1_covers = enumerate_covers(phi1, args.cover_budget, BOOLEAN)
    claimed = phi2_claimed_cover(out)
    audit = {
        "schema": "geored.counterexample/1",
        "tool_version": __version__,
        "phi1": {
            "variables": phi1.n,
            "clauses": len(phi1.constraints),
            "names": list(phi1.provenance["names"]),
            "covers": sorted(cover_to_string(s) for s in phi1_covers),
            "cover_count": len(phi1_covers),
        },
        "phi2": {"variables": out.target.n, "clauses": len(out.target.constraints)},
        "witness_isomorphism": report.properties["witness_isomorphism"].to_dict(),
        "claimed_phi2_cover": {
            "cover": cover_to_string(claimed),
            "boolean": is_cover(out.target, claimed, BOOLEAN).to_dict(),
            "general": is_cover(out.target, claimed, GENERAL).to_dict(),
        },
    }
    text = _dumps(audit)
    if args.output is None:
        sys.stdout.write(text)
    else:
        dest = Path(args.output)
        dest.mkdir(parents=True, exist_ok=True)
        (dest / "phi1.cnf").write_text(serialize_dimacs(phi1))
        (dest / "phi2.cnf").write_text(serialize_dimacs(out.target))
        (dest / "audit.json").write_text(text)
    return EXIT_OK


SUITES = ("graphs", "one-in-three", "sat", "cnf", "pgb")


def cmd_generate(args) -> int:
    dest = Path(args.output)
    chosen = SUITES if args.suite == "all" else (args.suite,)
    for name in chosen:
        if name == "graphs":
            items = corpus.connected_graphs(args.max_n or 5)
        elif name == "one-in-three":
            items = corpus.one_in_three_suite(args.seed, args.count or 50, args.max_n or 12)
        elif name == "sat":
            items = corpus.sat_suite(args.seed, args.count or 40, args.max_n or 5)
        elif name == "cnf":
            items = corpus.cnf_suite(args.seed, args.count or 30, args.max_n or 8)
        else:
            items = corpus.pgb_suite(args.seed, args.max_n or 10)
        sub = dest / name
        sub.mkdir(parents=True, exist_ok=True)
        for i, obj in enumerate(items):
            text, suffix = instance_text(obj)
            (sub / f"{i:03d}{suffix}").write_text(text)
        print(f"{name}: {len(items)} instances", file=sys.stderr)
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("budgets must be positive")
    return v


def _positive_fraction(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("c must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geored", description="Brute-force audits of reductions between small constraint problems.")
    parser.add_argument("--version", action="version", version=f"geored {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def budgets(p, covers=False):
        p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET, help="max candidate witnesses")
        if covers:
            p.add_argument("--cover-budget", type=_positive, default=DEFAULT_BUDGET)
            p.add_argument("--target-cover-budget", type=_positive, default=DEFAULT_BUDGET)

    def reduction_opts(p, many=False):
        if many:
            p.add_argument("--reduction", action="append", required=True, help="stage, repeat in order")
        else:
            p.add_argument("--reduction", required=True, choices=sorted(REDUCTIONS))
        p.add_argument("--variant", choices=(EXACT_ONE, PAPER_NAE))
        p.add_argument("--k", type=_positive, help="colors for graph inputs (default 3)")

    p = sub.add_parser("reduce", help="map a source instance to its target")
    reduction_opts(p)
    budgets(p)
    p.add_argument("input")
    p.add_argument("--output", help="directory for target, provenance and witness table")
    p.set_defaults(func=cmd_reduce)

    for name, func, help_text in (("solve", cmd_solve, "list solutions"), ("covers", cmd_covers, "list covers")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input")
        p.add_argument("--kind", help="problem kind override (e.g. kcol, pgb, csp)")
        p.add_argument("--k", type=_positive)
        p.add_argument("--output")
        budgets(p, covers=True)
        if name == "covers":
            p.add_argument("--predicate", choices=(BOOLEAN, GENERAL))
        p.set_defaults(func=func)

    for name, func, many in (("verify", cmd_verify, False), ("compose", cmd_compose, True)):
        p = sub.add_parser(name, help="audit a reduction" if not many else "audit a chain of reductions")
        reduction_opts(p, many)
        budgets(p, covers=True)
        p.add_argument("input", help="instance file or directory")
        p.add_argument("--checks", default="wi,overlap,cover")
        p.add_argument("--tolerance", choices=("exact", "c-over-n"), default="c-over-n")
        p.add_argument("--c", type=_positive_fraction, default=Fraction(2))
        p.add_argument("--strict", action="store_true", help="treat partial and not-applicable as failure")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output")
        p.set_defaults(func=func)

    p = sub.add_parser("counterexample", help="emit the 4-SAT counterexample and its audit")
    budgets(p, covers=True)
    p.add_argument("--output", help="directory for phi1.cnf, phi2.cnf and audit.json")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("generate", help="write a seeded instance suite")
    p.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=_positive)
    p.add_argument("--max-n", type=_positive)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
