"""Per-kind witness spaces, overlaps and cover predicates used by the verifier.

A kind names what a reduction side accepts ("cnf", "kcol", "pgb", ...).  For
the sign-quotiented kinds (``pgb`` and ``counting-csp``) witnesses are
canonical representatives and overlaps and compatibility are taken modulo the
value involution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Mapping, Sequence

from . import covers as cv
from .covers import GeneralizedAssignment
from .csp import (
    Assignment,
    BudgetExceeded,
    CspInstance,
    apply_involution,
    canonical_mod,
    enumerate_solutions,
    evaluate,
)
from .pls import (
    AStarInstance,
    PathEncoding,
    augmenting_paths,
    decode_path,
    encode_path,
    is_augmenting_path,
    maxsat_positions,
)
from .reductions import SIGNED_FLIP, SPIN_FLIP, ColoringInstance, is_perfect_bisection, perfect_bisections, raw_bisections


@dataclass(frozen=True)
class Problem:
    name: str
    witnesses: Callable[[Any, int], list[Assignment]]
    is_witness: Callable[[Any, Assignment], bool]
    involution: Mapping[int, int] | None = None
    covers: Callable[[Any, int], list[GeneralizedAssignment]] | None = None
    is_cover: Callable[[Any, GeneralizedAssignment], cv.CoverVerdict] | None = None

    def canonical(self, y: Sequence[int]) -> Assignment:
        return canonical_mod(self.involution, y) if self.involution else tuple(y)

    def canonical_cover(self, sigma: GeneralizedAssignment) -> GeneralizedAssignment:
        if not self.involution:
            return tuple(sigma)
        flipped = cv.negate_cover(self.involution, sigma)
        key = lambda s: tuple(tuple(sorted(x)) for x in s)  # noqa: E731
        return min(tuple(sigma), flipped, key=key)

    def compatible(self, y: Sequence[int], sigma: GeneralizedAssignment) -> bool:
        if cv.is_compatible(y, sigma):
            return True
        return bool(self.involution) and cv.is_compatible(apply_involution(self.involution, y), sigma)


def _csp_problem(name: str, predicate: str, view: Callable[[Any], CspInstance] = lambda x: x) -> Problem:
    return Problem(
        name=name,
        witnesses=lambda x, budget: enumerate_solutions(view(x), budget),
        is_witness=lambda x, y: len(y) == view(x).n and evaluate(view(x), y),
        covers=lambda x, budget: cv.enumerate_covers(view(x), budget, predicate),
        is_cover=lambda x, s: cv.is_cover(view(x), s, predicate),
    )


def _astar_width(inst: AStarInstance) -> int:
    return (inst.base.n - 1) // 2


def astar_witnesses(inst: AStarInstance, budget: int) -> list[Assignment]:
    """Bit encodings of every augmenting path, padded to ``d`` blocks."""
    n = _astar_width(inst)
    pos = maxsat_positions(n)
    return sorted(encode_path(p, pos, n).bits(pad_to=inst.d) for p in augmenting_paths(inst, budget))


def astar_is_witness(inst: AStarInstance, z: Sequence[int]) -> bool:
    n = _astar_width(inst)
    if len(z) != inst.d * (2 * n + 2):
        return False
    try:
        path = decode_path(PathEncoding.from_bits(n, z), maxsat_positions(n), inst.start)
    except ValueError:
        return False
    return is_augmenting_path(inst, path)


def _pgb_is_witness(graph, y) -> bool:
    return is_perfect_bisection(graph, y)


def pgb_cluster_covers(graph, budget: int) -> list[GeneralizedAssignment]:
    if 2**graph.n > budget:
        raise BudgetExceeded(2**graph.n, budget, "side vectors")
    sols = raw_bisections(graph)
    if not sols:
        return []
    return cv.cluster_cover(sols, cv.swap_adjacent, SPIN_FLIP)


def _pgb_witnesses(graph, budget: int) -> list[Assignment]:
    if 2**graph.n > budget:
        raise BudgetExceeded(2**graph.n, budget, "side vectors")
    return perfect_bisections(graph)


def _counting_witnesses(inst: CspInstance, budget: int) -> list[Assignment]:
    return sorted({canonical_mod(SIGNED_FLIP, x) for x in enumerate_solutions(inst, budget)})


def _counting_covers(inst: CspInstance, budget: int) -> list[GeneralizedAssignment]:
    p = PROBLEMS["counting-csp"]
    seen = {}
    for sigma in cv.enumerate_covers(inst, budget, cv.GENERAL):
        c = p.canonical_cover(sigma)
        seen.setdefault(c, None)
    return list(seen)


PROBLEMS: dict[str, Problem] = {
    "cnf": _csp_problem("cnf", cv.BOOLEAN),
    "csp": _csp_problem("csp", cv.GENERAL),
    "one-in-k": _csp_problem("one-in-k", cv.GENERAL),
    "kcol": _csp_problem("kcol", cv.GENERAL, ColoringInstance.to_csp),
    "astar": Problem("astar", astar_witnesses, astar_is_witness),
    "pgb": Problem("pgb", _pgb_witnesses, _pgb_is_witness, SPIN_FLIP, pgb_cluster_covers, None),
    "counting-csp": Problem(
        "counting-csp",
        _counting_witnesses,
        lambda x, y: len(y) == x.n and evaluate(x, y),
        SIGNED_FLIP,
        _counting_covers,
        lambda x, s: cv.is_cover_general(x, s),
    ),
}


def problem(kind: str) -> Problem:
    try:
        return PROBLEMS[kind]
    except KeyError:
        raise ValueError(f"unknown problem kind {kind!r}") from None
