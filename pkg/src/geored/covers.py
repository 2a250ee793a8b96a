"""Generalized assignments, supported variables and covers.

A generalized assignment is a tuple of nonempty frozensets of domain values;
in the boolean case the set ``{0, 1}`` plays the role of ``*``.  Two cover
predicates are provided: the clause-specific one (``"boolean"``: every clause
has a satisfied literal or two stars, and every fixed variable is the unique
satisfier of some clause whose other literals are false) and the general one
(``"general"``: no value is removable by generalized arc consistency and every
fixed variable is pinned by a fully fixed constraint).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .csp import (
    DEFAULT_BUDGET,
    Assignment,
    BudgetExceeded,
    Clause,
    Counting,
    CspInstance,
    Domain,
    Extensional,
    apply_involution,
    constraint_holds,
    hamming,
)

GeneralizedAssignment = tuple[frozenset[int], ...]

BOOLEAN = "boolean"
GENERAL = "general"


@dataclass(frozen=True)
class EliminationFinding:
    variable: int
    value: int
    constraint: int


@dataclass(frozen=True)
class CoverVerdict:
    is_cover: bool
    reason: str | None = None
    finding: EliminationFinding | None = None
    variable: int | None = None
    constraint: int | None = None

    def __bool__(self) -> bool:
        return self.is_cover

    def to_dict(self) -> dict:
        out: dict = {"is_cover": self.is_cover, "reason": self.reason}
        if self.finding is not None:
            out["finding"] = {
                "variable": self.finding.variable,
                "value": self.finding.value,
                "constraint": self.finding.constraint,
            }
        if self.variable is not None:
            out["variable"] = self.variable
        if self.constraint is not None:
            out["constraint"] = self.constraint
        return out


COVER = CoverVerdict(True)


# -- construction and (de)serialization ----------------------------------------


def full_assignment(n: int, k: int) -> GeneralizedAssignment:
    return tuple(frozenset(range(k)) for _ in range(n))


def from_assignment(a: Sequence[int]) -> GeneralizedAssignment:
    return tuple(frozenset((v,)) for v in a)


def is_assignment(sigma: GeneralizedAssignment) -> bool:
    return all(len(s) == 1 for s in sigma)


def to_assignment(sigma: GeneralizedAssignment) -> Assignment:
    if not is_assignment(sigma):
        raise ValueError("generalized assignment has non-singleton sets")
    return tuple(next(iter(s)) for s in sigma)


def is_compatible(a: Sequence[int], sigma: GeneralizedAssignment) -> bool:
    if len(a) != len(sigma):
        raise ValueError(f"length mismatch: {len(a)} vs {len(sigma)}")
    return all(v in s for v, s in zip(a, sigma))


def negate_cover(involution: Mapping[int, int], sigma: GeneralizedAssignment) -> GeneralizedAssignment:
    return tuple(frozenset(involution[v] for v in s) for s in sigma)


_CHARS = {frozenset((0,)): "0", frozenset((1,)): "1", frozenset((0, 1)): "*"}


def cover_to_string(sigma: GeneralizedAssignment) -> str:
    """Compact ``{0,1,*}`` form of a boolean generalized assignment."""
    try:
        return "".join(_CHARS[s] for s in sigma)
    except KeyError:
        raise ValueError("not a boolean generalized assignment") from None


def cover_from_string(text: str) -> GeneralizedAssignment:
    lookup = {c: s for s, c in _CHARS.items()}
    try:
        return tuple(lookup[c] for c in text.strip())
    except KeyError as exc:
        raise ValueError(f"bad cover character {exc}") from None


def cover_to_labels(sigma: GeneralizedAssignment, domain: Domain) -> list[list[str]]:
    return [[domain.label(v) for v in sorted(s)] for s in sigma]


def cover_from_labels(rows: Iterable[Iterable[str]], domain: Domain) -> GeneralizedAssignment:
    return tuple(frozenset(domain.value_of(str(x)) for x in row) for row in rows)


def value_subsets(k: int) -> list[frozenset[int]]:
    """Nonempty subsets of ``range(k)`` in lexicographic order of their sorted tuples."""
    subs = [c for r in range(1, k + 1) for c in itertools.combinations(range(k), r)]
    return [frozenset(c) for c in sorted(subs)]


# -- boolean (clause) predicates -------------------------------------------------

_TRUE, _FALSE, _STAR = "T", "F", "*"


def _literal_state(sigma: Sequence[frozenset[int]], v: int, sign: bool) -> str:
    s = sigma[v]
    if len(s) > 1:
        return _STAR
    return _TRUE if (1 in s) == sign else _FALSE


def _require_cnf(F: CspInstance) -> None:
    if not F.is_cnf:
        raise ValueError("the boolean cover predicate needs a CNF instance")


def is_supported_boolean(F: CspInstance, sigma: Sequence[frozenset[int]], v: int) -> bool:
    if len(sigma[v]) != 1:
        raise ValueError(f"variable {v} is not fixed under sigma")
    for ci in F.occurrences[v]:
        c = F.constraints[ci]
        states = {u: _literal_state(sigma, u, s) for u, s in c.literals}
        if states[v] == _TRUE and all(st == _FALSE for u, st in states.items() if u != v):
            return True
    return False


def _clause_condition(F: CspInstance, ci: int, sigma: Sequence[frozenset[int]]) -> bool:
    states = [_literal_state(sigma, u, s) for u, s in F.constraints[ci].literals]
    return _TRUE in states or states.count(_STAR) >= 2


def is_cover_boolean(F: CspInstance, sigma: GeneralizedAssignment) -> CoverVerdict:
    _require_cnf(F)
    for ci in range(len(F.constraints)):
        if not _clause_condition(F, ci, sigma):
            return CoverVerdict(False, "clause-violation", constraint=ci)
    for v in range(F.n):
        if len(sigma[v]) == 1 and not is_supported_boolean(F, sigma, v):
            return CoverVerdict(False, "unsupported-variable", variable=v)
    return COVER


# -- general-domain predicates -------------------------------------------------------


def counting_feasible(value_sets: Sequence[Iterable[int]], m: int) -> bool:
    """Whether one value per set (from {-1, 0, 1}) can sum to +m or -m."""
    reach = {0}
    for s in value_sets:
        reach = {t + x for t in reach for x in s}
    return m in reach or -m in reach


def _signed_sets(F: CspInstance, sigma: Sequence[frozenset[int]], scope: Sequence[int]) -> list[set[int]]:
    sv = F.domain.signed_value
    return [{sv(d) for d in sigma[u]} for u in scope]


def _constraint_eliminations(F: CspInstance, ci: int, sigma: Sequence[frozenset[int]]) -> list[EliminationFinding]:
    c = F.constraints[ci]
    body = c.body
    found = []
    if isinstance(body, Clause):
        sat = [1 if s else 0 for s in body.signs]
        can_hold = [sat[p] in sigma[u] for p, u in enumerate(c.scope)]
        for p, u in enumerate(c.scope):
            others = any(can_hold[q] for q in range(len(c.scope)) if q != p)
            for d in sorted(sigma[u]):
                if d != sat[p] and not others:
                    found.append(EliminationFinding(u, d, ci))
    elif isinstance(body, Extensional):
        live = [t for t in body.allowed if all(t[q] in sigma[u] for q, u in enumerate(c.scope))]
        for p, u in enumerate(c.scope):
            supported = {t[p] for t in live}
            found += [EliminationFinding(u, d, ci) for d in sorted(sigma[u]) if d not in supported]
    else:
        sets = _signed_sets(F, sigma, c.scope)
        for p, u in enumerate(c.scope):
            for d in sorted(sigma[u]):
                pinned = sets[:p] + [{F.domain.signed_value(d)}] + sets[p + 1:]
                if not counting_feasible(pinned, body.target):
                    found.append(EliminationFinding(u, d, ci))
    return found


def gac_eliminable(F: CspInstance, sigma: GeneralizedAssignment) -> list[EliminationFinding]:
    """Values with no support tuple inside the current sets, per constraint."""
    out = []
    for ci in range(len(F.constraints)):
        out += _constraint_eliminations(F, ci, sigma)
    return out


def is_supported_general(F: CspInstance, sigma: Sequence[frozenset[int]], v: int) -> bool:
    if len(sigma[v]) != 1:
        raise ValueError(f"variable {v} is not fixed under sigma")
    current = next(iter(sigma[v]))
    for ci in F.occurrences[v]:
        c = F.constraints[ci]
        if any(len(sigma[u]) != 1 for u in c.scope):
            continue
        values = [0] * F.n
        for u in c.scope:
            values[u] = next(iter(sigma[u]))
        if not constraint_holds(F, c, values):
            continue
        pinned = True
        for lam in range(F.domain.k):
            if lam == current:
                continue
            values[v] = lam
            if constraint_holds(F, c, values):
                pinned = False
                break
        if pinned:
            return True
    return False


def is_cover_general(F: CspInstance, sigma: GeneralizedAssignment) -> CoverVerdict:
    for ci in range(len(F.constraints)):
        found = _constraint_eliminations(F, ci, sigma)
        if found:
            return CoverVerdict(False, "eliminable-value", finding=found[0], constraint=ci)
    for v in range(F.n):
        if len(sigma[v]) == 1 and not is_supported_general(F, sigma, v):
            return CoverVerdict(False, "unsupported-variable", variable=v)
    return COVER


def _resolve(F: CspInstance, predicate: str | None) -> str:
    if predicate is None:
        return BOOLEAN if F.is_cnf else GENERAL
    if predicate not in (BOOLEAN, GENERAL):
        raise ValueError(f"unknown cover predicate {predicate!r}")
    return predicate


def is_cover(F: CspInstance, sigma: GeneralizedAssignment, predicate: str | None = None) -> CoverVerdict:
    if _resolve(F, predicate) == BOOLEAN:
        return is_cover_boolean(F, sigma)
    return is_cover_general(F, sigma)


def is_true_cover(
    F: CspInstance,
    sigma: GeneralizedAssignment,
    budget: int = DEFAULT_BUDGET,
    predicate: str | None = None,
) -> bool:
    """A cover compatible with at least one satisfying assignment."""
    size = 1
    for s in sigma:
        size *= len(s)
    if size > budget:
        raise BudgetExceeded(size, budget, "compatible assignments")
    if not is_cover(F, sigma, predicate):
        return False
    closing: list[list] = [[] for _ in range(F.n)]
    for c in F.constraints:
        closing[max(c.scope)].append(c)
    values = [0] * F.n
    choices = [sorted(s) for s in sigma]

    def rec(i: int) -> bool:
        if i == F.n:
            return True
        for d in choices[i]:
            values[i] = d
            if all(constraint_holds(F, c, values) for c in closing[i]) and rec(i + 1):
                return True
        return False

    return rec(0)


def enumerate_covers(
    F: CspInstance, budget: int = DEFAULT_BUDGET, predicate: str | None = None
) -> list[GeneralizedAssignment]:
    """Every generalized assignment passing the cover predicate, in canonical order.

    Candidates are built variable by variable in :func:`value_subsets` order.
    A constraint's local condition is tested as soon as its scope is complete,
    and a fixed variable's support as soon as every constraint touching it is;
    both tests depend only on those sets, so pruning never drops a cover.
    """
    pred = _resolve(F, predicate)
    if pred == BOOLEAN:
        _require_cnf(F)
    subsets = value_subsets(F.domain.k)
    total = len(subsets) ** F.n
    if total > budget:
        raise BudgetExceeded(total, budget, "cover candidates")
    n = F.n
    closing: list[list[int]] = [[] for _ in range(n)]
    for ci, c in enumerate(F.constraints):
        closing[max(c.scope)].append(ci)
    settled: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        last = max([v] + [max(F.constraints[ci].scope) for ci in F.occurrences[v]])
        settled[last].append(v)

    if pred == BOOLEAN:
        local_ok = lambda ci, s: _clause_condition(F, ci, s)  # noqa: E731
        supported = is_supported_boolean
    else:
        local_ok = lambda ci, s: not _constraint_eliminations(F, ci, s)  # noqa: E731
        supported = is_supported_general

    sigma: list = [None] * n
    out: list[GeneralizedAssignment] = []

    def rec(i: int) -> None:
        if i == n:
            out.append(tuple(sigma))
            return
        for s in subsets:
            sigma[i] = s
            if all(local_ok(ci, sigma) for ci in closing[i]) and all(
                len(sigma[v]) > 1 or supported(F, sigma, v) for v in settled[i]
            ):
                rec(i + 1)
        sigma[i] = None

    rec(0)
    return out


# -- cluster covers ---------------------------------------------------------------------


def single_flip_adjacent(a: Sequence[int], b: Sequence[int]) -> bool:
    return hamming(a, b) == 1


def swap_adjacent(a: Sequence[int], b: Sequence[int]) -> bool:
    """Whether ``b`` is ``a`` with two positions holding different values exchanged."""
    diff = [i for i, (x, y) in enumerate(zip(a, b)) if x != y]
    if len(diff) != 2:
        return False
    i, j = diff
    return a[i] == b[j] and a[j] == b[i]


def solution_clusters(
    solutions: Iterable[Sequence[int]],
    adjacent: Callable[[Sequence[int], Sequence[int]], bool],
    alignment: Mapping[int, int] | None = None,
) -> list[list[Assignment]]:
    """Connected components of the solution graph, each sorted, ordered by least member.

    With ``alignment`` (an involution on values) a component and its mirror
    image describe the same cluster; only the one holding the lexicographically
    least member is kept.
    """
    sols = sorted(set(tuple(s) for s in solutions))
    if not sols:
        raise ValueError("cluster cover of an empty solution set")
    parent = list(range(len(sols)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(range(len(sols)), 2):
        if adjacent(sols[i], sols[j]):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[Assignment]] = {}
    for i, s in enumerate(sols):
        groups.setdefault(find(i), []).append(s)
    comps = sorted(groups.values(), key=lambda c: c[0])
    if alignment is None:
        return comps
    index = {s: find(i) for i, s in enumerate(sols)}
    kept = []
    for comp in comps:
        mirror = index.get(apply_involution(alignment, comp[0]))
        if mirror is None or mirror == index[comp[0]]:
            kept.append(comp)
            continue
        if comp[0] <= groups[mirror][0]:
            kept.append(comp)
    return kept


def union_cover(members: Sequence[Sequence[int]]) -> GeneralizedAssignment:
    return tuple(frozenset(col) for col in zip(*members))


def cluster_cover(
    solutions: Iterable[Sequence[int]],
    adjacent: Callable[[Sequence[int], Sequence[int]], bool],
    alignment: Mapping[int, int] | None = None,
) -> list[GeneralizedAssignment]:
    """Pointwise union of every cluster returned by :func:`solution_clusters`."""
    return [union_cover(c) for c in solution_clusters(solutions, adjacent, alignment)]
