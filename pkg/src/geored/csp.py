"""Constraint satisfaction core: instances, parsing, evaluation, enumeration, overlaps.

Values are always the integers ``0..k-1``.  A domain may attach symbolic
labels; counting constraints read their arithmetic meaning from labels
``"-1"``, ``"0"``, ``"1"``.  Variables are 0-based internally and 1-based in
the DIMACS formats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

Assignment = tuple[int, ...]

DEFAULT_BUDGET = 1 << 24

DECISION = "decision"
WEIGHTED_MAXSAT = "weighted-maxsat"
COUNTING_CSP = "counting-csp"
KINDS = (DECISION, WEIGHTED_MAXSAT, COUNTING_CSP)

SIGNED_LABELS = ("-1", "0", "1")


class ParseError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """Raised when an exhaustive scan would exceed its candidate budget."""

    def __init__(self, required: int, budget: int, what: str = "candidates"):
        super().__init__(f"{what}: {required} required, budget is {budget}")
        self.required = required
        self.budget = budget


@dataclass(frozen=True)
class Domain:
    k: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"domain size must be >= 2, got {self.k}")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != self.k or len(set(self.labels)) != self.k:
                raise ValueError("labels must be k pairwise distinct names")

    @classmethod
    def boolean(cls) -> Domain:
        return cls(2)

    @classmethod
    def signed(cls) -> Domain:
        """The {-1, 0, 1} domain used by counting CSPs."""
        return cls(3, SIGNED_LABELS)

    @property
    def is_signed(self) -> bool:
        return self.labels is not None and set(self.labels) == set(SIGNED_LABELS)

    def label(self, value: int) -> str:
        return self.labels[value] if self.labels else str(value)

    def value_of(self, label: str) -> int:
        if self.labels is None:
            return int(label)
        return self.labels.index(label)

    def signed_value(self, value: int) -> int:
        return int(self.labels[value])

    def negation(self) -> dict[int, int]:
        """Value permutation negating labels (-1 <-> 1, 0 fixed)."""
        if not self.is_signed:
            raise ValueError("negation is defined only on signed domains")
        return {v: self.value_of(str(-self.signed_value(v))) for v in range(self.k)}


@dataclass(frozen=True)
class Clause:
    """Disjunction over the constraint's scope; ``signs[i]`` is True for a positive literal."""

    signs: tuple[bool, ...]

    @property
    def arity(self) -> int:
        return len(self.signs)


@dataclass(frozen=True)
class Extensional:
    arity: int
    allowed: frozenset[tuple[int, ...]]


@dataclass(frozen=True)
class Counting:
    """CC_m: satisfied when the labeled values sum to +m or -m."""

    target: int

    @property
    def arity(self) -> None:
        return None


Body = Union[Clause, Extensional, Counting]


@dataclass(frozen=True)
class Constraint:
    scope: tuple[int, ...]
    body: Body
    weight: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(self.scope))
        if len(set(self.scope)) != len(self.scope):
            raise ValueError(f"scope has repeated variables: {self.scope}")
        if not self.scope:
            raise ValueError("empty scope")
        arity = self.body.arity
        if arity is not None and arity != len(self.scope):
            raise ValueError(f"scope length {len(self.scope)} != body arity {arity}")
        if self.weight is not None and self.weight <= 0:
            raise ValueError("weights must be positive")

    @property
    def literals(self) -> list[tuple[int, bool]]:
        if not isinstance(self.body, Clause):
            raise TypeError("only clauses have literals")
        return list(zip(self.scope, self.body.signs))


def clause(*literals: int, weight: int | None = None) -> Constraint:
    """Build a clause from signed 1-based DIMACS literals."""
    return Constraint(
        tuple(abs(l) - 1 for l in literals), Clause(tuple(l > 0 for l in literals)), weight
    )


@dataclass(frozen=True)
class CspInstance:
    n: int
    domain: Domain
    constraints: tuple[Constraint, ...]
    kind: str = DECISION
    provenance: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.n < 0:
            raise ValueError("negative variable count")
        if self.kind not in KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        k = self.domain.k
        for c in self.constraints:
            if any(v >= self.n or v < 0 for v in c.scope):
                raise ValueError(f"scope {c.scope} out of range for n={self.n}")
            body = c.body
            if isinstance(body, Clause) and k != 2:
                raise ValueError("clauses need a boolean domain")
            if isinstance(body, Extensional):
                if not body.allowed:
                    raise ValueError("extensional relation with no allowed tuples")
                for t in body.allowed:
                    if len(t) != body.arity or any(not 0 <= x < k for x in t):
                        raise ValueError(f"bad tuple {t} for arity {body.arity}, k={k}")
            if isinstance(body, Counting):
                if not self.domain.is_signed:
                    raise ValueError("counting constraints need the {-1,0,1} labels")
                if body.target < 0:
                    raise ValueError("counting target must be nonnegative")
        if self.kind == WEIGHTED_MAXSAT and any(c.weight is None for c in self.constraints):
            raise ValueError("weighted-maxsat instances need a weight on every constraint")
        if self.kind == COUNTING_CSP and any(
            not isinstance(c.body, Counting) for c in self.constraints
        ):
            raise ValueError("counting-csp instances hold only counting constraints")

    @property
    def is_cnf(self) -> bool:
        return self.domain.k == 2 and all(isinstance(c.body, Clause) for c in self.constraints)

    @cached_property
    def occurrences(self) -> tuple[tuple[int, ...], ...]:
        """Constraint indices containing each variable."""
        occ: list[list[int]] = [[] for _ in range(self.n)]
        for i, c in enumerate(self.constraints):
            for v in c.scope:
                occ[v].append(i)
        return tuple(tuple(o) for o in occ)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for {self.n} vertices")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        return cls(n, frozenset(edges))

    @property
    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


# -- evaluation --------------------------------------------------------------


def constraint_holds(instance: CspInstance, c: Constraint, values: Sequence[int]) -> bool:
    body = c.body
    if isinstance(body, Clause):
        return any((values[v] == 1) == s for v, s in zip(c.scope, body.signs))
    if isinstance(body, Extensional):
        return tuple(values[v] for v in c.scope) in body.allowed
    total = sum(instance.domain.signed_value(values[v]) for v in c.scope)
    return abs(total) == body.target


def _check_length(instance: CspInstance, values: Sequence[int]) -> None:
    if len(values) != instance.n:
        raise ValueError(f"assignment has length {len(values)}, instance has {instance.n} variables")


def evaluate(instance: CspInstance, assignment: Sequence[int]) -> bool:
    _check_length(instance, assignment)
    return all(constraint_holds(instance, c, assignment) for c in instance.constraints)


def maxsat_weight(instance: CspInstance, assignment: Sequence[int]) -> int:
    _check_length(instance, assignment)
    return sum(
        c.weight or 0 for c in instance.constraints if constraint_holds(instance, c, assignment)
    )


def enumerate_solutions(instance: CspInstance, budget: int = DEFAULT_BUDGET) -> list[Assignment]:
    """All satisfying assignments in lexicographic order.

    The search is a plain backtracking scan that tests each constraint once its
    last scope variable is fixed; it refuses with :class:`BudgetExceeded` when
    ``k**n`` exceeds ``budget``.
    """
    k, n = instance.domain.k, instance.n
    if k**n > budget:
        raise BudgetExceeded(k**n, budget, "solution candidates")
    closing: list[list[Constraint]] = [[] for _ in range(n)]
    for c in instance.constraints:
        closing[max(c.scope)].append(c)
    out: list[Assignment] = []
    values = [0] * n

    def rec(i: int) -> None:
        if i == n:
            out.append(tuple(values))
            return
        for d in range(k):
            values[i] = d
            if all(constraint_holds(instance, c, values) for c in closing[i]):
                rec(i + 1)

    rec(0)
    return out


# -- overlaps ------------------------------------------------------------------


def hamming(y1: Sequence[int], y2: Sequence[int]) -> int:
    if len(y1) != len(y2):
        raise ValueError(f"length mismatch: {len(y1)} vs {len(y2)}")
    return sum(a != b for a, b in zip(y1, y2))


def overlap(y1: Sequence[int], y2: Sequence[int]) -> Fraction:
    d = hamming(y1, y2)
    if not y1:
        raise ValueError("overlap of empty witnesses is undefined")
    return Fraction(d, len(y1))


def check_involution(involution: Mapping[int, int]) -> None:
    for a, b in involution.items():
        if involution.get(b) != a:
            raise ValueError(f"map is not self-inverse at {a} -> {b}")


def apply_involution(involution: Mapping[int, int], y: Sequence[int]) -> Assignment:
    return tuple(involution[v] for v in y)


def overlap_mod_negation(
    y1: Sequence[int], y2: Sequence[int], involution: Mapping[int, int]
) -> Fraction:
    check_involution(involution)
    d = min(hamming(y1, y2), hamming(apply_involution(involution, y1), y2))
    if not y1:
        raise ValueError("overlap of empty witnesses is undefined")
    return Fraction(d, len(y1))


def canonical_mod(involution: Mapping[int, int], y: Sequence[int]) -> Assignment:
    """Lexicographically smaller of ``y`` and its image under ``involution``."""
    return min(tuple(y), apply_involution(involution, y))


# -- DIMACS --------------------------------------------------------------------


def _content_lines(text: str) -> list[str]:
    lines = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line[0] in "c%":
            continue
        lines.append(line)
    return lines


def _clause_from_literals(lits: list[int], n: int, weight: int | None) -> Constraint:
    if not lits:
        raise ParseError("zero-length clause")
    seen: dict[int, int] = {}
    for lit in lits:
        v = abs(lit)
        if v > n:
            raise ParseError(f"literal {lit} out of range for {n} variables")
        if v in seen and seen[v] != lit:
            raise ParseError(f"tautological clause {lits}")
        seen[v] = lit
    return clause(*seen.values(), weight=weight)


def parse_dimacs(text: str) -> CspInstance:
    """Parse DIMACS ``p cnf`` or ``p wcnf`` text into a CSP instance."""
    lines = _content_lines(text)
    if not lines or not lines[0].startswith("p"):
        raise ParseError("missing problem line")
    header = lines[0].split()
    if len(header) not in (4, 5) or header[1] not in ("cnf", "wcnf"):
        raise ParseError(f"malformed header: {lines[0]!r}")
    weighted = header[1] == "wcnf"
    try:
        n, m = int(header[2]), int(header[3])
    except ValueError:
        raise ParseError(f"malformed header: {lines[0]!r}") from None
    if n < 0 or m < 0 or (len(header) == 5 and not weighted):
        raise ParseError(f"malformed header: {lines[0]!r}")
    try:
        tokens = [int(t) for line in lines[1:] for t in line.split()]
    except ValueError as exc:
        raise ParseError(f"non-integer token: {exc}") from None
    constraints = []
    i = 0
    while i < len(tokens):
        weight = None
        if weighted:
            weight = tokens[i]
            i += 1
            if weight <= 0:
                raise ParseError(f"non-positive clause weight {weight}")
        lits = []
        while i < len(tokens) and tokens[i] != 0:
            lits.append(tokens[i])
            i += 1
        if i == len(tokens):
            raise ParseError("clause not terminated by 0")
        i += 1
        constraints.append(_clause_from_literals(lits, n, weight))
    if len(constraints) != m:
        raise ParseError(f"header declares {m} clauses, found {len(constraints)}")
    return CspInstance(n, Domain.boolean(), constraints, WEIGHTED_MAXSAT if weighted else DECISION)


def serialize_dimacs(instance: CspInstance) -> str:
    if not instance.is_cnf:
        raise ValueError("only CNF instances have a DIMACS form")
    weighted = instance.kind == WEIGHTED_MAXSAT
    lines = [f"p {'wcnf' if weighted else 'cnf'} {instance.n} {len(instance.constraints)}"]
    for c in instance.constraints:
        lits = [str(v + 1 if s else -(v + 1)) for v, s in c.literals]
        prefix = [str(c.weight)] if weighted else []
        lines.append(" ".join(prefix + lits + ["0"]))
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    """Parse ``p edge n m`` / ``e u v`` text, or a bare edge list headed by the vertex count."""
    lines = _content_lines(text)
    if not lines:
        raise ParseError("empty graph file")
    head = lines[0].split()
    try:
        if head[0] == "p":
            if len(head) != 4 or head[1] not in ("edge", "col"):
                raise ParseError(f"malformed header: {lines[0]!r}")
            n = int(head[2])
            pairs = []
            for line in lines[1:]:
                parts = line.split()
                if parts[0] != "e" or len(parts) != 3:
                    raise ParseError(f"malformed edge line: {line!r}")
                pairs.append((int(parts[1]), int(parts[2])))
        else:
            if len(head) > 2:
                raise ParseError(f"malformed header: {lines[0]!r}")
            n = int(head[0])
            pairs = []
            for line in lines[1:]:
                parts = line.split()
                if len(parts) != 2:
                    raise ParseError(f"malformed edge line: {line!r}")
                pairs.append((int(parts[0]), int(parts[1])))
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from None
    for u, v in pairs:
        if u == v:
            raise ParseError(f"self-loop at vertex {u}")
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(f"edge ({u}, {v}) out of range for {n} vertices")
    return Graph.from_edges(n, ((u - 1, v - 1) for u, v in pairs))


def serialize_graph(graph: Graph) -> str:
    lines = [f"p edge {graph.n} {len(graph.edges)}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in graph.sorted_edges]
    return "\n".join(lines) + "\n"


# -- JSON ------------------------------------------------------------------------


def _body_to_dict(body: Body) -> dict:
    if isinstance(body, Clause):
        return {"type": "clause", "signs": list(body.signs)}
    if isinstance(body, Extensional):
        return {"type": "extensional", "arity": body.arity, "allowed": sorted(map(list, body.allowed))}
    return {"type": "counting", "target": body.target}


def _body_from_dict(d: dict) -> Body:
    kind = d.get("type")
    if kind == "clause":
        return Clause(tuple(bool(s) for s in d["signs"]))
    if kind == "extensional":
        return Extensional(int(d["arity"]), frozenset(tuple(t) for t in d["allowed"]))
    if kind == "counting":
        return Counting(int(d["target"]))
    raise ParseError(f"unknown constraint body type {kind!r}")


def csp_to_dict(instance: CspInstance) -> dict:
    out = {
        "n": instance.n,
        "domain": {"k": instance.domain.k, "labels": list(instance.domain.labels) if instance.domain.labels else None},
        "kind": instance.kind,
        "constraints": [],
    }
    for c in instance.constraints:
        entry = {"scope": list(c.scope), "body": _body_to_dict(c.body)}
        if c.weight is not None:
            entry["weight"] = c.weight
        out["constraints"].append(entry)
    return out


def csp_from_dict(d: dict) -> CspInstance:
    try:
        dom = d["domain"]
        domain = Domain(int(dom["k"]), tuple(dom["labels"]) if dom.get("labels") else None)
        constraints = [
            Constraint(tuple(c["scope"]), _body_from_dict(c["body"]), c.get("weight"))
            for c in d["constraints"]
        ]
        return CspInstance(int(d["n"]), domain, constraints, d.get("kind", DECISION))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed CSP JSON: {exc!r}") from None
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def dumps_csp(instance: CspInstance) -> str:
    return json.dumps(csp_to_dict(instance), sort_keys=True, indent=1) + "\n"


def loads_csp(text: str) -> CspInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return csp_from_dict(data)
