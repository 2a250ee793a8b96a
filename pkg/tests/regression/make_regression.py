"""Regenerate the frozen regression artifacts from brute-force oracle runs.

Run from the repository root:  python tests/regression/make_regression.py
"""

import json
from pathlib import Path

from geored import corpus
from geored.covers import BOOLEAN, GENERAL, cover_to_string, enumerate_covers
from geored.reductions import EXACT_ONE, PAPER_NAE, build_counterexample_phi1, reduce_1ink_to_ksat, reduce_pgb_to_counting
from geored.verify import check_cover_preservation

HERE = Path(__file__).parent


def dump(name, data):
    (HERE / name).write_text(json.dumps(data, sort_keys=True, indent=1) + "\n")


def phi1_covers():
    found = enumerate_covers(build_counterexample_phi1(), predicate=BOOLEAN)
    return {"count": len(found), "covers": sorted(cover_to_string(s) for s in found)}


def oneink_comparison():
    rows = []
    for i, inst in enumerate(corpus.one_in_three_suite(seed=0)):
        if inst.n > 8:
            continue
        source = sorted(cover_to_string(s) for s in enumerate_covers(inst, predicate=GENERAL))
        row = {"index": i, "n": inst.n, "constraints": len(inst.constraints), "source_covers": len(source)}
        for variant in (EXACT_ONE, PAPER_NAE):
            _, out = reduce_1ink_to_ksat(inst, variant)
            target = sorted(cover_to_string(s) for s in enumerate_covers(out.target, predicate=BOOLEAN))
            row[variant] = {"target_covers": len(target), "identical": target == source}
        rows.append(row)
    return rows


def predicate_comparison():
    rows = []
    for i, inst in enumerate(corpus.cnf_suite(seed=0)):
        b = {cover_to_string(s) for s in enumerate_covers(inst, predicate=BOOLEAN)}
        g = {cover_to_string(s) for s in enumerate_covers(inst, predicate=GENERAL)}
        rows.append(
            {
                "index": i,
                "n": inst.n,
                "clauses": len(inst.constraints),
                "boolean": len(b),
                "general": len(g),
                "agree": b == g,
                "boolean_only": sorted(b - g),
                "general_only": sorted(g - b),
            }
        )
    return rows


def pgb_membership():
    rows = []
    for i, g in enumerate(corpus.pgb_suite(seed=0)):
        R, out = reduce_pgb_to_counting(g)
        v = check_cover_preservation(R, g, out=out)
        rows.append(
            {
                "index": i,
                "edges": [list(e) for e in g.sorted_edges],
                "status": v.status,
                "source_covers": v.counts.get("source_covers"),
                "preservation_checks": v.counts.get("preservation_checks"),
                "preservation_failures": v.counts.get("preservation_failures"),
                "bijection": v.checks.get("bijection"),
            }
        )
    return rows


if __name__ == "__main__":
    dump("phi1_covers.json", phi1_covers())
    dump("oneink_cover_comparison.json", oneink_comparison())
    dump("predicate_comparison.json", predicate_comparison())
    dump("pgb_cover_membership.json", pgb_membership())
