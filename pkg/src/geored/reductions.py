"""Concrete reductions with their witness and cover maps, plus identity and composition.

Every reduction is a :class:`Reduction` whose ``transform`` turns a source
instance into a :class:`ReductionOutput`; witness and cover maps take that
output as context, so a composed reduction can thread the intermediate
instance through both stages.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .covers import GeneralizedAssignment
from .csp import (
    COUNTING_CSP,
    WEIGHTED_MAXSAT,
    Assignment,
    Clause,
    Constraint,
    Counting,
    CspInstance,
    Domain,
    Extensional,
    Graph,
    canonical_mod,
    clause,
)
from .pls import AStarInstance, PathEncoding, PathWitness, decode_path, encode_path, maxsat_positions

WI = "witness-isomorphic"
OVERLAP = "overlap-preserving"
COVER = "cover-preserving"

SPIN_FLIP = {0: 1, 1: 0}
SIGNED_FLIP = {0: 2, 1: 1, 2: 0}


@dataclass(frozen=True)
class OverlapMap:
    """A claimed overlap transfer map of the form ``coefficient * x ** power``."""

    coefficient: Fraction = Fraction(1)
    power: int = 1

    @classmethod
    def identity(cls) -> OverlapMap:
        return cls()

    @classmethod
    def scale(cls, c) -> OverlapMap:
        return cls(Fraction(c), 1)

    @classmethod
    def square(cls) -> OverlapMap:
        return cls(Fraction(1), 2)

    @property
    def tag(self) -> str:
        if self.power == 1:
            return "identity" if self.coefficient == 1 else f"scale({self.coefficient})"
        if self.power == 2 and self.coefficient == 1:
            return "square"
        return f"{self.coefficient}*x^{self.power}"

    def __call__(self, x: Fraction) -> Fraction:
        return self.coefficient * Fraction(x) ** self.power

    def after(self, inner: OverlapMap) -> OverlapMap:
        """``self`` composed with ``inner``: x -> self(inner(x))."""
        return OverlapMap(self.coefficient * inner.coefficient**self.power, self.power * inner.power)


def compose_claims(outer: OverlapMap | None, inner: OverlapMap | None) -> OverlapMap | None:
    if outer is None or inner is None:
        return None
    return outer.after(inner)


@dataclass(frozen=True)
class ReductionOutput:
    source: Any
    target: Any
    provenance: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()
    parts: tuple[ReductionOutput, ...] = ()


WitnessMap = Callable[[ReductionOutput, Assignment], Assignment]
CoverMap = Callable[[ReductionOutput, GeneralizedAssignment], GeneralizedAssignment]


@dataclass(frozen=True)
class Reduction:
    name: str
    source_kind: str
    target_kind: str
    transform: Callable[[Any], ReductionOutput]
    witness_map: WitnessMap
    witness_inverse: WitnessMap
    cover_map: CoverMap | None = None
    overlap_claim: OverlapMap | None = None
    claims: frozenset[str] = frozenset()

    def apply(self, x: Any) -> ReductionOutput:
        return self.transform(x)

    def g(self, out: ReductionOutput, y: Sequence[int]) -> Assignment:
        return tuple(self.witness_map(out, tuple(y)))

    def g_inv(self, out: ReductionOutput, z: Sequence[int]) -> Assignment:
        return tuple(self.witness_inverse(out, tuple(z)))

    def gbar(self, out: ReductionOutput, sigma: GeneralizedAssignment) -> GeneralizedAssignment:
        if self.cover_map is None:
            raise ValueError(f"{self.name} has no cover map")
        return tuple(frozenset(s) for s in self.cover_map(out, tuple(sigma)))


# -- source problem helpers --------------------------------------------------------------


@dataclass(frozen=True)
class ColoringInstance:
    graph: Graph
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")

    def to_csp(self) -> CspInstance:
        neq = Extensional(2, frozenset((a, b) for a in range(self.k) for b in range(self.k) if a != b))
        return CspInstance(
            self.graph.n, Domain(self.k), [Constraint((u, v), neq) for u, v in self.graph.sorted_edges]
        )


def one_in_k(n: int, scopes: Sequence[Sequence[int]]) -> CspInstance:
    """Boolean instance whose constraints each demand exactly one true variable."""
    cons = []
    for scope in scopes:
        r = len(scope)
        allowed = frozenset(tuple(int(i == j) for i in range(r)) for j in range(r))
        cons.append(Constraint(tuple(scope), Extensional(r, allowed)))
    return CspInstance(n, Domain.boolean(), cons)


def _is_exactly_one(c: Constraint) -> bool:
    body = c.body
    if not isinstance(body, Extensional):
        return False
    r = body.arity
    return body.allowed == frozenset(tuple(int(i == j) for i in range(r)) for j in range(r))


def is_perfect_bisection(graph: Graph, y: Sequence[int]) -> bool:
    if len(y) != graph.n or sum(y) * 2 != graph.n:
        return False
    return all(y[u] == y[v] for u, v in graph.edges)


def raw_bisections(graph: Graph) -> list[Assignment]:
    """All perfect bisections as 0/1 side vectors (0 is the -1 side), both orientations."""
    return [y for y in itertools.product((0, 1), repeat=graph.n) if is_perfect_bisection(graph, y)]


def perfect_bisections(graph: Graph) -> list[Assignment]:
    """One canonical (lexicographically least) representative per sign class."""
    return sorted({canonical_mod(SPIN_FLIP, y) for y in raw_bisections(graph)})


# -- identity and composition ----------------------------------------------------------------


def _identity_map(out: ReductionOutput, y):
    return y


def identity_reduction(kind: str) -> Reduction:
    return Reduction(
        name=f"identity[{kind}]",
        source_kind=kind,
        target_kind=kind,
        transform=lambda x: ReductionOutput(x, x),
        witness_map=_identity_map,
        witness_inverse=_identity_map,
        cover_map=_identity_map,
        overlap_claim=OverlapMap.identity(),
        claims=frozenset({WI, OVERLAP, COVER}),
    )


def compose(first: Reduction, second: Reduction) -> Reduction:
    """The reduction applying ``first`` and then ``second``."""
    if first.target_kind != second.source_kind:
        raise ValueError(
            f"cannot compose: {first.name} targets {first.target_kind}, "
            f"{second.name} expects {second.source_kind}"
        )

    def transform(x):
        o1 = first.apply(x)
        o2 = second.apply(o1.target)
        return ReductionOutput(x, o2.target, o2.provenance, o1.notes + o2.notes, (o1, o2))

    def g(out, y):
        o1, o2 = out.parts
        return second.g(o2, first.g(o1, y))

    def g_inv(out, z):
        o1, o2 = out.parts
        return first.g_inv(o1, second.g_inv(o2, z))

    gbar = None
    if first.cover_map is not None and second.cover_map is not None:

        def gbar(out, sigma):
            o1, o2 = out.parts
            return second.gbar(o2, first.gbar(o1, sigma))

    return Reduction(
        name=f"{second.name}.{first.name}",
        source_kind=first.source_kind,
        target_kind=second.target_kind,
        transform=transform,
        witness_map=g,
        witness_inverse=g_inv,
        cover_map=gbar,
        overlap_claim=compose_claims(second.overlap_claim, first.overlap_claim),
        claims=first.claims & second.claims,
    )


# -- k-COL -> k-SAT --------------------------------------------------------------------------


def _kcol_transform(src: ColoringInstance) -> ReductionOutput:
    k, g = src.k, src.graph
    var = lambda v, i: v * k + i  # noqa: E731
    cons = []
    for v in range(g.n):
        cons.append(clause(*(var(v, i) + 1 for i in range(k))))
        cons += [clause(-(var(v, i) + 1), -(var(v, j) + 1)) for i, j in itertools.combinations(range(k), 2)]
    for u, v in g.sorted_edges:
        cons += [clause(-(var(u, i) + 1), -(var(v, i) + 1)) for i in range(k)]
    target = CspInstance(g.n * k, Domain.boolean(), cons, provenance={"reduction": "kcol-ksat"})
    prov = {var(v, i): {"vertex": v, "color": i} for v in range(g.n) for i in range(k)}
    return ReductionOutput(src, target, prov)


def _kcol_g(out: ReductionOutput, c: Assignment) -> Assignment:
    k = out.source.k
    return tuple(int(c[v] == i) for v in range(len(c)) for i in range(k))


def _kcol_g_inv(out: ReductionOutput, z: Assignment) -> Assignment:
    k = out.source.k
    colors = []
    for v in range(len(z) // k):
        block = z[v * k : (v + 1) * k]
        if sum(block) != 1:
            raise ValueError(f"vertex {v} is not one-hot in {z}")
        colors.append(block.index(1))
    return tuple(colors)


def _kcol_gbar(out: ReductionOutput, w: GeneralizedAssignment) -> GeneralizedAssignment:
    k = out.source.k
    sets = []
    for allowed in w:
        for i in range(k):
            if i not in allowed:
                sets.append(frozenset({0}))
            elif len(allowed) == 1:
                sets.append(frozenset({1}))
            else:
                sets.append(frozenset({0, 1}))
    return tuple(sets)


def kcol_to_ksat() -> Reduction:
    return Reduction(
        name="kcol-ksat",
        source_kind="kcol",
        target_kind="cnf",
        transform=_kcol_transform,
        witness_map=_kcol_g,
        witness_inverse=_kcol_g_inv,
        cover_map=_kcol_gbar,
        overlap_claim=None,
        claims=frozenset({WI, OVERLAP, COVER}),
    )


def reduce_kcol_to_ksat(graph: Graph, k: int) -> tuple[Reduction, ReductionOutput]:
    r = kcol_to_ksat()
    return r, r.apply(ColoringInstance(graph, k))


# -- 1-in-k SAT -> k-SAT ---------------------------------------------------------------------

PAPER_NAE = "paper-nae"
EXACT_ONE = "exact-one"


def oneink_to_ksat(variant: str = EXACT_ONE) -> Reduction:
    """Translate exactly-one constraints to clauses without new variables.

    ``paper-nae`` emits one all-positive and one all-negative clause per
    constraint, which forbids only the all-equal tuples; ``exact-one`` adds the
    pairwise at-most-one clauses instead.
    """
    if variant not in (PAPER_NAE, EXACT_ONE):
        raise ValueError(f"unknown 1-in-k variant {variant!r}")

    def transform(src: CspInstance) -> ReductionOutput:
        if src.domain.k != 2 or not all(_is_exactly_one(c) for c in src.constraints):
            raise ValueError("source must consist of exactly-one constraints over booleans")
        cons = []
        for c in src.constraints:
            lits = [v + 1 for v in c.scope]
            cons.append(clause(*lits))
            if variant == PAPER_NAE:
                cons.append(clause(*(-l for l in lits)))
            else:
                cons += [clause(-a, -b) for a, b in itertools.combinations(lits, 2)]
        target = CspInstance(src.n, Domain.boolean(), cons, provenance={"reduction": f"oneink-ksat[{variant}]"})
        return ReductionOutput(src, target, {v: {"variable": v} for v in range(src.n)})

    return Reduction(
        name=f"oneink-ksat[{variant}]",
        source_kind="one-in-k",
        target_kind="cnf",
        transform=transform,
        witness_map=_identity_map,
        witness_inverse=_identity_map,
        cover_map=_identity_map,
        overlap_claim=OverlapMap.identity(),
        claims=frozenset({WI, OVERLAP, COVER}),
    )


def reduce_1ink_to_ksat(src: CspInstance, variant: str = EXACT_ONE) -> tuple[Reduction, ReductionOutput]:
    r = oneink_to_ksat(variant)
    return r, r.apply(src)


# -- SAT -> MAX-SAT* -------------------------------------------------------------------------


def maxsatstar_formula(phi: CspInstance) -> CspInstance:
    """Weighted formula over x_1..x_n, b_1..b_n, alpha (indices 0..n-1, n..2n-1, 2n)."""
    if not phi.is_cnf:
        raise ValueError("source must be a CNF formula")
    n, m = phi.n, len(phi.constraints)
    if m == 0:
        raise ValueError("source formula needs at least one clause")
    x = lambda j: j + 1  # noqa: E731
    b = lambda j: n + j + 1  # noqa: E731
    alpha = 2 * n + 1
    cons = [clause(x(i), b(i), weight=m + 1) for i in range(n)]
    for c in phi.constraints:
        lits = [v + 1 if s else -(v + 1) for v, s in c.literals]
        cons.append(clause(*lits, alpha, weight=1))
    for j in range(n):
        for i in range(j + 1, n):
            cons.append(clause(x(j), b(j), -x(i), weight=3 * m))
            cons.append(clause(x(j), b(j), -b(i), weight=3 * m))
    return CspInstance(2 * n + 1, Domain.boolean(), cons, WEIGHTED_MAXSAT, provenance={"reduction": "sat-maxsatstar"})


def assignment_path(n: int, a: Sequence[int]) -> PathWitness:
    """Flip x_i when a(x_i) = 1 and b_i otherwise, for i = 1..n in order."""
    return PathWitness((0,) * (2 * n + 1), tuple(j if a[j] else n + j for j in range(n)))


def _sat_transform(phi: CspInstance) -> ReductionOutput:
    n = phi.n
    psi = maxsatstar_formula(phi)
    inst = AStarInstance(psi, (0,) * (2 * n + 1), n)
    prov = {j: {"source_variable": j, "role": "x"} for j in range(n)}
    prov.update({n + j: {"source_variable": j, "role": "b"} for j in range(n)})
    prov[2 * n] = {"role": "alpha", "auxiliary": True}
    return ReductionOutput(phi, inst, prov)


def _sat_g(out: ReductionOutput, a: Assignment) -> Assignment:
    n = out.source.n
    enc = encode_path(assignment_path(n, a), maxsat_positions(n), n)
    return enc.bits(pad_to=n)


def _sat_g_inv(out: ReductionOutput, z: Assignment) -> Assignment:
    n = out.source.n
    path = decode_path(PathEncoding.from_bits(n, z), maxsat_positions(n), (0,) * (2 * n + 1))
    if len(path.flips) != n:
        raise ValueError("path does not flip one variable per source variable")
    a = []
    for j, f in enumerate(path.flips):
        if f == j:
            a.append(1)
        elif f == n + j:
            a.append(0)
        else:
            raise ValueError(f"step {j} flips variable {f}, not x_{j + 1} or b_{j + 1}")
    return tuple(a)


def sat_to_maxsatstar() -> Reduction:
    return Reduction(
        name="sat-maxsatstar",
        source_kind="cnf",
        target_kind="astar",
        transform=_sat_transform,
        witness_map=_sat_g,
        witness_inverse=_sat_g_inv,
        overlap_claim=OverlapMap.identity(),
        claims=frozenset({WI, OVERLAP}),
    )


def reduce_sat_to_maxsatstar(phi: CspInstance) -> tuple[Reduction, ReductionOutput]:
    r = sat_to_maxsatstar()
    return r, r.apply(phi)


# -- PGB -> counting CSP ----------------------------------------------------------------------


def pair_index(n: int, k: int, l: int) -> int:
    """Position of the pair {k, l} in the lexicographic list of pairs of ``range(n)``."""
    if k > l:
        k, l = l, k
    return k * n - k * (k + 1) // 2 + (l - k - 1)


def counting_image(graph: Graph) -> CspInstance:
    """One CC_{n-4} per edge (i, j) over the pairs meeting i or j, except {i, j} itself."""
    n = graph.n
    cons = []
    for i, j in graph.sorted_edges:
        scope = sorted(
            {pair_index(n, i, m) for m in range(n) if m not in (i, j)}
            | {pair_index(n, j, m) for m in range(n) if m not in (i, j)}
        )
        cons.append(Constraint(tuple(scope), Counting(n - 4)))
    return CspInstance(
        n * (n - 1) // 2, Domain.signed(), cons, COUNTING_CSP, provenance={"reduction": "pgb-counting"}
    )


def _pgb_transform(graph: Graph) -> ReductionOutput:
    n = graph.n
    if n % 2:
        raise ValueError("perfect bisection needs an even vertex count")
    if n < 4:
        raise ValueError("the counting image needs at least 4 vertices")
    notes = ()
    if n <= 8:
        notes = (f"n={n} is at or below 8, where CC_(n-4) need not force a perfect bisection",)
    prov = {pair_index(n, k, l): {"pair": [k, l]} for k, l in itertools.combinations(range(n), 2)}
    return ReductionOutput(graph, counting_image(graph), prov, notes)


def _pair_values(y: Sequence[int]) -> Assignment:
    # (s_k + s_l) / 2 in label space is y_k + y_l in value space.
    return tuple(y[k] + y[l] for k, l in itertools.combinations(range(len(y)), 2))


def _pgb_g(out: ReductionOutput, y: Assignment) -> Assignment:
    return canonical_mod(SIGNED_FLIP, _pair_values(y))


def _pgb_g_inv(out: ReductionOutput, x: Assignment) -> Assignment:
    n = out.source.n
    for cand in (x, tuple(SIGNED_FLIP[v] for v in x)):
        y = (0,) + tuple(cand[pair_index(n, 0, l)] for l in range(1, n))
        if all(v in (0, 1) for v in y) and _pair_values(y) == cand:
            return canonical_mod(SPIN_FLIP, y)
    raise ValueError("assignment is not the pair image of any side vector")


def _pgb_gbar(out: ReductionOutput, c: GeneralizedAssignment) -> GeneralizedAssignment:
    return tuple(
        frozenset(a + b for a in c[k] for b in c[l]) for k, l in itertools.combinations(range(len(c)), 2)
    )


def pgb_to_counting() -> Reduction:
    return Reduction(
        name="pgb-counting",
        source_kind="pgb",
        target_kind="counting-csp",
        transform=_pgb_transform,
        witness_map=_pgb_g,
        witness_inverse=_pgb_g_inv,
        cover_map=_pgb_gbar,
        overlap_claim=OverlapMap.square(),
        claims=frozenset({WI, OVERLAP, COVER}),
    )


def reduce_pgb_to_counting(graph: Graph) -> tuple[Reduction, ReductionOutput]:
    r = pgb_to_counting()
    return r, r.apply(graph)


# -- 4-SAT -> 3-SAT --------------------------------------------------------------------------


def _foursat_transform(phi: CspInstance) -> ReductionOutput:
    if not phi.is_cnf:
        raise ValueError("source must be a CNF formula")
    n = phi.n
    cons = []
    splits = []
    prov: dict = {v: {"source_variable": v} for v in range(n)}
    for ci, c in enumerate(phi.constraints):
        lits = [v + 1 if s else -(v + 1) for v, s in c.literals]
        if len(lits) > 4:
            raise ValueError(f"clause {ci} has {len(lits)} literals")
        if len(lits) < 4:
            cons.append(clause(*lits))
            continue
        aux = n + len(splits)
        prov[aux] = {"auxiliary": True, "splits_clause": ci}
        splits.append((ci, aux))
        cons.append(clause(lits[0], lits[1], aux + 1))
        cons.append(clause(-(aux + 1), lits[2], lits[3]))
    target = CspInstance(n + len(splits), Domain.boolean(), cons, provenance={"reduction": "foursat-threesat"})
    return ReductionOutput(phi, target, prov)


def _split_heads(out: ReductionOutput) -> list[list[tuple[int, bool]]]:
    phi = out.source
    return [phi.constraints[p["splits_clause"]].literals[:2] for v, p in sorted(out.provenance.items()) if p.get("auxiliary")]


def _foursat_g(out: ReductionOutput, a: Assignment) -> Assignment:
    aux = [int(all((a[v] == 1) != s for v, s in head)) for head in _split_heads(out)]
    return tuple(a) + tuple(aux)


def _foursat_g_inv(out: ReductionOutput, z: Assignment) -> Assignment:
    return tuple(z[: out.source.n])


def _foursat_gbar(out: ReductionOutput, sigma: GeneralizedAssignment) -> GeneralizedAssignment:
    aux = []
    for head in _split_heads(out):
        states = [{int((d == 1) == s) for d in sigma[v]} for v, s in head]
        if any(st == {1} for st in states):
            aux.append(frozenset({0}))
        elif all(st == {0} for st in states):
            aux.append(frozenset({1}))
        else:
            aux.append(frozenset({0, 1}))
    return tuple(sigma) + tuple(aux)


def foursat_to_threesat() -> Reduction:
    """Split each 4-clause (a b c d) into (a b alpha) and (-alpha c d).

    The auxiliary takes value 1 exactly when both head literals are false,
    which makes the witness map a function; the map on generalized assignments
    applies the same rule to the head literals' possible values.
    """
    return Reduction(
        name="foursat-threesat",
        source_kind="cnf",
        target_kind="cnf",
        transform=_foursat_transform,
        witness_map=_foursat_g,
        witness_inverse=_foursat_g_inv,
        cover_map=_foursat_gbar,
        overlap_claim=None,
        claims=frozenset(),
    )


def reduce_4sat_to_3sat(phi: CspInstance) -> tuple[Reduction, ReductionOutput]:
    r = foursat_to_threesat()
    return r, r.apply(phi)


PHI1_NAMES = ("x", "y", "z", "t", "x1", "x2", "x3", "x4")


def build_counterexample_phi1() -> CspInstance:
    """(x y z t) plus four 4-clauses forcing (x y) and four forcing (z t)."""
    x, y, z, t, x1, x2, x3, x4 = range(1, 9)
    cons = [clause(x, y, z, t)]
    for head, (p, q) in (((x, y), (x1, x2)), ((z, t), (x3, x4))):
        for sp, sq in ((1, 1), (-1, 1), (1, -1), (-1, -1)):
            cons.append(clause(*head, sp * p, sq * q))
    return CspInstance(8, Domain.boolean(), cons, provenance={"names": list(PHI1_NAMES)})


def phi2_claimed_cover(out: ReductionOutput) -> GeneralizedAssignment:
    """x = 1, z = 1, the auxiliary splitting (x y z t) left free, every other variable free."""
    target = out.target
    star = frozenset({0, 1})
    sigma = [star] * target.n
    sigma[0] = frozenset({1})
    sigma[2] = frozenset({1})
    return tuple(sigma)


REDUCTIONS: dict[str, Callable[..., Reduction]] = {
    "kcol-ksat": kcol_to_ksat,
    "oneink-ksat": oneink_to_ksat,
    "sat-maxsatstar": sat_to_maxsatstar,
    "pgb-counting": pgb_to_counting,
    "foursat-threesat": foursat_to_threesat,
}
