"""Brute-force audits of witness isomorphism, overlap preservation and cover preservation.

Every check works on one concrete instance.  A verdict is ``holds``,
``fails`` (always with a counterexample that can be replayed through the
predicates), ``partial`` (some sub-check was beyond its budget) or
``not-applicable``.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

import numpy as np

from . import __version__
from .covers import GeneralizedAssignment, from_assignment
from .csp import DEFAULT_BUDGET, BudgetExceeded
from .problems import problem
from .reductions import OverlapMap, Reduction, ReductionOutput

HOLDS, FAILS, PARTIAL, NA = "holds", "fails", "partial", "not-applicable"

REPORT_SCHEMA = "geored.report/1"

PLAIN, MOD_NEGATION = "plain", "mod-negation"


def combine(statuses: Iterable[str]) -> str:
    statuses = [s for s in statuses if s != NA]
    if not statuses:
        return NA
    if FAILS in statuses:
        return FAILS
    if PARTIAL in statuses:
        return PARTIAL
    return HOLDS


def frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _cover_json(sigma: GeneralizedAssignment) -> list[list[int]]:
    return [sorted(s) for s in sigma]


@dataclass
class Verdict:
    status: str
    checks: dict[str, str] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    counterexample: dict | None = None
    notes: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"status": self.status, "checks": dict(self.checks), "counts": dict(self.counts)}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.notes:
            out["notes"] = list(self.notes)
        if self.data:
            out["data"] = self.data
        return out


# -- witness isomorphism -------------------------------------------------------------------


def check_witness_isomorphism(
    R: Reduction, x: Any, budget: int = DEFAULT_BUDGET, out: ReductionOutput | None = None
) -> Verdict:
    out = out if out is not None else R.apply(x)
    src, tgt = problem(R.source_kind), problem(R.target_kind)
    v = Verdict(PARTIAL)
    try:
        sources = src.witnesses(x, budget)
    except BudgetExceeded as exc:
        v.notes.append(f"source witnesses not enumerable: {exc}")
        v.checks = dict.fromkeys(("totality", "membership", "inverse", "injectivity", "surjectivity"), PARTIAL)
        return v
    v.counts["source_witnesses"] = len(sources)
    images: dict = {}
    failure = None
    checks = dict.fromkeys(("totality", "membership", "inverse", "injectivity"), HOLDS)
    for y in sources:
        try:
            z = R.g(out, y)
        except Exception as exc:  # the witness map must be total on witnesses
            checks["totality"] = FAILS
            failure = failure or {"check": "totality", "witness": list(y), "error": str(exc)}
            continue
        if not tgt.is_witness(out.target, z):
            checks["membership"] = FAILS
            failure = failure or {"check": "membership", "witness": list(y), "image": list(z)}
        try:
            back = R.g_inv(out, z)
        except Exception as exc:
            back = None
            err = str(exc)
        if back != src.canonical(y):
            checks["inverse"] = FAILS
            failure = failure or {
                "check": "inverse",
                "witness": list(y),
                "image": list(z),
                "inverse": list(back) if back is not None else err,
            }
        key = tgt.canonical(z)
        if key in images:
            checks["injectivity"] = FAILS
            failure = failure or {"check": "injectivity", "witnesses": [list(images[key]), list(y)], "image": list(z)}
        else:
            images[key] = y
    v.counts["distinct_images"] = len(images)
    try:
        targets = tgt.witnesses(out.target, budget)
    except BudgetExceeded as exc:
        checks["surjectivity"] = PARTIAL
        v.notes.append(f"target witnesses not enumerable: {exc}")
    else:
        v.counts["target_witnesses"] = len(targets)
        missing = [z for z in targets if tgt.canonical(z) not in images]
        checks["surjectivity"] = FAILS if missing else HOLDS
        if missing:
            failure = failure or {
                "check": "surjectivity",
                "target_witness": list(missing[0]),
                "unmatched": len(missing),
            }
        checks["decision"] = HOLDS if bool(sources) == bool(targets) else FAILS
    v.checks = checks
    v.counterexample = failure
    v.status = combine(checks.values())
    return v


# -- overlap profiles ----------------------------------------------------------------------


@dataclass
class OverlapProfile:
    pairs: Counter = field(default_factory=Counter)
    n: int = 0

    def __len__(self) -> int:
        return sum(self.pairs.values())

    def points(self) -> list[tuple[Fraction, Fraction, int]]:
        return sorted((s, t, m) for (s, t), m in self.pairs.items())

    def groups(self) -> dict[Fraction, list[Fraction]]:
        out: dict[Fraction, list[Fraction]] = {}
        for s, t, m in self.points():
            out.setdefault(s, []).extend([t] * m)
        return out

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "pairs": [{"source": frac(s), "target": frac(t), "multiplicity": m} for s, t, m in self.points()],
        }


def _distance_rows(kind_problem, selector: str | None):
    """Return ``f(Y, i)`` giving exact Hamming distances from row ``i`` to rows ``i+1:`` of ``Y``."""
    selector = selector or (MOD_NEGATION if kind_problem.involution else PLAIN)
    if selector == PLAIN:
        return lambda Y, i: (Y[i + 1 :] != Y[i]).sum(axis=1)
    if selector == MOD_NEGATION:
        inv = kind_problem.involution
        if inv is None:
            raise ValueError(f"{kind_problem.name} has no negation to quotient by")
        table = np.arange(max(inv) + 1)
        for a, b in inv.items():
            table[a] = b

        def dist(Y, i):
            rest = Y[i + 1 :]
            return np.minimum((rest != Y[i]).sum(axis=1), (rest != table[Y[i]]).sum(axis=1))

        return dist
    raise ValueError(f"unknown overlap metric {selector!r}")


def collect_overlap_pairs(
    R: Reduction,
    x: Any,
    budget: int = DEFAULT_BUDGET,
    source_metric: str | None = None,
    target_metric: str | None = None,
    out: ReductionOutput | None = None,
) -> OverlapProfile:
    """Overlap of every unordered pair of distinct source witnesses against that of their images."""
    out = out if out is not None else R.apply(x)
    src, tgt = problem(R.source_kind), problem(R.target_kind)
    ds, dt = _distance_rows(src, source_metric), _distance_rows(tgt, target_metric)
    ws = src.witnesses(x, budget)
    prof = OverlapProfile(n=len(ws[0]) if ws else 0)
    if len(ws) < 2:
        return prof
    images = [R.g(out, y) for y in ws]
    Y, Z = np.array(ws, dtype=np.int64), np.array(images, dtype=np.int64)
    ns, nt = Y.shape[1], Z.shape[1]
    counts: Counter = Counter()
    for i in range(len(ws) - 1):
        pairs, mult = np.unique(np.stack([ds(Y, i), dt(Z, i)], axis=1), axis=0, return_counts=True)
        for (a, b), m in zip(pairs.tolist(), mult.tolist()):
            counts[(a, b)] += m
    for (a, b), m in counts.items():
        prof.pairs[(Fraction(a, ns), Fraction(b, nt))] += m
    return prof


def resolve_tolerance(tolerance, n: int, c: Fraction | int = 2) -> Fraction:
    """``"exact"`` means 0; ``None`` means ``c / n``; anything else is taken as a number."""
    if tolerance == "exact":
        return Fraction(0)
    if tolerance is None:
        return Fraction(c) / n if n else Fraction(0)
    return Fraction(tolerance)


def check_overlap_preservation(
    profile: OverlapProfile, h_claim: OverlapMap | None = None, tolerance=None, c: Fraction | int = 2
) -> Verdict:
    tol = resolve_tolerance(tolerance, profile.n, c)
    v = Verdict(PARTIAL)
    v.counts["overlap_pairs"] = len(profile)
    groups = profile.groups()
    v.data = {
        "tolerance": frac(tol),
        "points": [
            {"source": frac(s), "target_min": frac(min(ts)), "target_max": frac(max(ts)), "multiplicity": len(ts)}
            for s, ts in groups.items()
        ],
    }
    if not groups:
        v.status = NA
        v.notes.append("fewer than two witnesses; no overlap to test")
        v.checks = dict.fromkeys(("functionality", "monotonicity", "h0", "h1"), NA)
        return v
    checks: dict[str, str] = {}
    failure = None

    checks["functionality"] = HOLDS
    for s, ts in groups.items():
        if max(ts) - min(ts) > tol:
            checks["functionality"] = FAILS
            failure = failure or {
                "check": "functionality",
                "pairs": [[frac(s), frac(min(ts))], [frac(s), frac(max(ts))]],
            }

    checks["monotonicity"] = HOLDS
    keys = sorted(groups)
    for a, b in zip(keys, keys[1:]):
        if max(groups[a]) > min(groups[b]) + tol:
            checks["monotonicity"] = FAILS
            failure = failure or {
                "check": "monotonicity",
                "pairs": [[frac(a), frac(max(groups[a]))], [frac(b), frac(min(groups[b]))]],
            }

    if Fraction(0) in groups:
        bad = max(groups[Fraction(0)])
        checks["h0"] = HOLDS if bad <= tol else FAILS
        if bad > tol:
            failure = failure or {"check": "h0", "pairs": [["0/1", frac(bad)]]}
    else:
        checks["h0"] = NA
        v.notes.append("h(0)=0 untestable: no pair with source overlap 0")
    if Fraction(1) in groups:
        worst = min(groups[Fraction(1)])
        v.data["h1_target_min"] = frac(worst)
        v.data["h1_deviation"] = frac(1 - worst)
        if worst != 1:
            v.notes.append(f"h(1) endpoint deviates by {frac(1 - worst)}: source overlap 1 maps to {frac(worst)}")
        checks["h1"] = HOLDS if 1 - worst <= tol else FAILS
        if 1 - worst > tol:
            failure = failure or {"check": "h1", "pairs": [["1/1", frac(worst)]]}
    else:
        checks["h1"] = NA
        v.notes.append("h(1)=1 untestable: no pair with source overlap 1")

    num = sum(s * t * m for s, t, m in profile.points())
    den = sum(s * s * m for s, t, m in profile.points())
    if den:
        v.data["fitted_scale"] = frac(num / den)
    if h_claim is not None:
        dev, where = max((abs(t - h_claim(s)), (s, t)) for s, t, _ in profile.points())
        v.data["claim"] = h_claim.tag
        v.data["claim_max_deviation"] = frac(dev)
        hden = sum(h_claim(s) ** 2 * m for s, _, m in profile.points())
        if hden:
            v.data["claim_fitted_scale"] = frac(sum(t * h_claim(s) * m for s, t, m in profile.points()) / hden)
        checks["claim"] = HOLDS if dev <= tol else FAILS
        if dev > tol:
            failure = failure or {"check": "claim", "claim": h_claim.tag, "pairs": [[frac(where[0]), frac(where[1])]]}
    v.checks = checks
    v.counterexample = failure
    v.status = combine(checks.values())
    return v


# -- cover preservation ------------------------------------------------------------------------


def check_cover_preservation(
    R: Reduction,
    x: Any,
    budget: int = DEFAULT_BUDGET,
    cover_budget: int = DEFAULT_BUDGET,
    target_cover_budget: int = DEFAULT_BUDGET,
    out: ReductionOutput | None = None,
) -> Verdict:
    """Check that the cover map extends g, preserves covers and compatibility, and is bijective.

    The preservation check (a source cover compatible with a witness must map
    to a target cover compatible with the mapped witness) always runs; the
    bijection between whole cover sets runs only when the target cover space
    fits ``target_cover_budget``.
    """
    if R.cover_map is None:
        return Verdict(NA, notes=[f"{R.name} has no cover map"])
    out = out if out is not None else R.apply(x)
    src, tgt = problem(R.source_kind), problem(R.target_kind)
    v = Verdict(PARTIAL)
    checks: dict[str, str] = {}
    failure = None
    try:
        witnesses = src.witnesses(x, budget)
        source_covers = src.covers(x, cover_budget) if src.covers else None
    except BudgetExceeded as exc:
        v.notes.append(f"source side not enumerable: {exc}")
        v.checks = dict.fromkeys(("extends", "preservation", "bijection"), PARTIAL)
        return v
    if source_covers is None:
        v.notes.append(f"{src.name} has no cover enumeration")
        v.checks = {"extends": PARTIAL, "preservation": NA, "bijection": NA}
        return v
    v.counts["source_witnesses"] = len(witnesses)
    v.counts["source_covers"] = len(source_covers)

    checks["extends"] = HOLDS
    for y in witnesses:
        lhs = tgt.canonical_cover(R.gbar(out, from_assignment(y)))
        rhs = tgt.canonical_cover(from_assignment(R.g(out, y)))
        if lhs != rhs:
            checks["extends"] = FAILS
            failure = failure or {"check": "extends", "witness": list(y), "cover_image": _cover_json(lhs)}

    if tgt.is_cover is None:
        checks["preservation"] = NA
        v.notes.append(f"{tgt.name} has no cover predicate")
    else:
        checked = bad = 0
        reasons: Counter = Counter()
        image_cache: dict = {}
        for y in witnesses:
            gy = R.g(out, y)
            for z in source_covers:
                if not src.compatible(y, z):
                    continue
                checked += 1
                if z not in image_cache:
                    img = R.gbar(out, z)
                    image_cache[z] = (img, tgt.is_cover(out.target, img))
                img, verdict = image_cache[z]
                ok = bool(verdict) and tgt.compatible(gy, img)
                if not ok:
                    bad += 1
                    reasons[verdict.reason or "incompatible"] += 1
                    failure = failure or {
                        "check": "preservation",
                        "witness": list(y),
                        "cover": _cover_json(z),
                        "image": _cover_json(img),
                        "verdict": verdict.to_dict(),
                    }
        v.counts["preservation_checks"] = checked
        v.counts["preservation_failures"] = bad
        if reasons:
            v.data["failure_reasons"] = dict(sorted(reasons.items()))
        checks["preservation"] = FAILS if bad else HOLDS

    if tgt.covers is None:
        checks["bijection"] = NA
    else:
        try:
            target_covers = tgt.covers(out.target, target_cover_budget)
        except BudgetExceeded as exc:
            checks["bijection"] = PARTIAL
            v.notes.append(f"target covers not enumerable: {exc}")
        else:
            v.counts["target_covers"] = len(target_covers)
            tset = {tgt.canonical_cover(s) for s in target_covers}
            images: dict = {}
            bij = HOLDS
            for z in source_covers:
                img = tgt.canonical_cover(R.gbar(out, z))
                if img in images:
                    bij = FAILS
                    failure = failure or {
                        "check": "bijection",
                        "covers": [_cover_json(images[img]), _cover_json(z)],
                        "image": _cover_json(img),
                    }
                images.setdefault(img, z)
            unmatched = sorted(tset - images.keys(), key=_cover_json)
            stray = sorted(images.keys() - tset, key=_cover_json)
            v.counts["target_covers_without_preimage"] = len(unmatched)
            v.counts["images_not_covers"] = len(stray)
            if unmatched or stray:
                bij = FAILS
                if unmatched:
                    failure = failure or {"check": "bijection", "target_cover": _cover_json(unmatched[0])}
                else:
                    failure = failure or {"check": "bijection", "image_not_cover": _cover_json(stray[0])}
            checks["bijection"] = bij
    v.checks = checks
    v.counterexample = failure
    v.status = combine(checks.values())
    return v


# -- reports -----------------------------------------------------------------------------------

WI_KEY, OVERLAP_KEY, COVER_KEY = "witness_isomorphism", "overlap_preservation", "cover_preservation"
CHECK_NAMES = {"wi": WI_KEY, "overlap": OVERLAP_KEY, "cover": COVER_KEY}


@dataclass
class VerificationReport:
    reduction: str = ""
    instance: str = ""
    properties: dict[str, Verdict] = field(default_factory=dict)
    profile: OverlapProfile | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def counts(self) -> dict[str, int]:
        totals = dict.fromkeys(("source_witnesses", "target_witnesses", "source_covers", "target_covers", "overlap_pairs"), 0)
        for verdict in self.properties.values():
            for key, val in verdict.counts.items():
                if key in totals:
                    totals[key] = max(totals[key], val)
        return totals

    def status(self, key: str) -> str:
        return self.properties[key].status if key in self.properties else NA

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "tool_version": __version__,
            "reduction": self.reduction,
            "instance": self.instance,
            "counts": self.counts,
            "properties": {k: v.to_dict() for k, v in self.properties.items()},
            "notes": list(self.notes),
        }


def _with_prerequisite(own: Verdict, pre: Verdict | None) -> Verdict:
    """Downgrade a verdict whose witness-isomorphism prerequisite did not hold."""
    own.data = dict(own.data)
    own.checks = dict(own.checks)
    if pre is None:
        return own
    own.checks["prerequisite"] = pre.status
    if pre.status == FAILS and own.status != NA:
        own.notes.append("witness isomorphism fails, so the property cannot hold")
        own.status = FAILS
        own.counterexample = own.counterexample or {"check": "prerequisite", "witness_isomorphism": pre.counterexample}
    elif pre.status == PARTIAL and own.status == HOLDS:
        own.status = PARTIAL
    return own


def verify_reduction(
    R: Reduction,
    x: Any,
    checks: Iterable[str] = ("wi", "overlap", "cover"),
    budget: int = DEFAULT_BUDGET,
    cover_budget: int = DEFAULT_BUDGET,
    target_cover_budget: int = DEFAULT_BUDGET,
    tolerance=None,
    c: Fraction | int = 2,
    instance_id: str = "",
) -> VerificationReport:
    """Run the requested checks in dependency order (witness isomorphism first)."""
    wanted = set(checks)
    unknown = wanted - CHECK_NAMES.keys()
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    out = R.apply(x)
    report = VerificationReport(R.name, instance_id, notes=list(out.notes))
    wi = check_witness_isomorphism(R, x, budget, out) if wanted & {"wi", "overlap", "cover"} else None
    if "wi" in wanted:
        report.properties[WI_KEY] = wi
    if "overlap" in wanted:
        try:
            prof = collect_overlap_pairs(R, x, budget, out=out)
        except BudgetExceeded as exc:
            own = Verdict(PARTIAL, notes=[f"source witnesses not enumerable: {exc}"])
        else:
            report.profile = prof
            own = check_overlap_preservation(prof, R.overlap_claim, tolerance, c)
        report.properties[OVERLAP_KEY] = _with_prerequisite(own, wi)
    if "cover" in wanted:
        own = check_cover_preservation(R, x, budget, cover_budget, target_cover_budget, out)
        report.properties[COVER_KEY] = _with_prerequisite(own, wi)
    return report


def emit_report(report: VerificationReport, fmt: str = "json") -> str:
    """Byte-stable JSON of the report, or the overlap profile as CSV."""
    if fmt == "json":
        return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["source_num", "source_den", "target_num", "target_den", "multiplicity"])
        if report.profile is not None:
            for s, t, m in report.profile.points():
                w.writerow([s.numerator, s.denominator, t.numerator, t.denominator, m])
        return buf.getvalue()
    raise ValueError(f"unknown report format {fmt!r}")
