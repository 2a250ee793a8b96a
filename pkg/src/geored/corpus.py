"""Seeded generators for the small-instance suites the checks run on."""

from __future__ import annotations

import random

import networkx as nx

from .csp import CspInstance, Domain, Graph, clause
from .reductions import build_counterexample_phi1, one_in_k


def connected_graphs(max_n: int = 5, min_n: int = 1) -> list[Graph]:
    """Every connected graph on ``min_n..max_n`` vertices, one per isomorphism class."""
    if max_n > 7:
        raise ValueError("the graph atlas only covers up to 7 vertices")
    out = []
    for g in nx.graph_atlas_g():
        if min_n <= g.number_of_nodes() <= max_n and nx.is_connected(g):
            out.append(Graph.from_edges(g.number_of_nodes(), g.edges()))
    return out


def planted_one_in_three(rng: random.Random, n: int, m: int) -> CspInstance:
    """A 1-in-3 instance on ``n`` variables with distinct scopes, all satisfied by a hidden assignment."""
    if n < 3:
        raise ValueError("1-in-3 needs at least 3 variables")
    planted = [rng.randrange(2) for _ in range(n)]
    if not any(planted):
        planted[rng.randrange(n)] = 1
    ones = [v for v in range(n) if planted[v]]
    zeros = [v for v in range(n) if not planted[v]]
    scopes: set[tuple[int, ...]] = set()
    for _ in range(20 * m):
        if len(scopes) == m or len(zeros) < 2:
            break
        scope = [rng.choice(ones), *rng.sample(zeros, 2)]
        rng.shuffle(scope)
        scopes.add(tuple(scope))
    return one_in_k(n, sorted(scopes))


def one_in_three_suite(seed: int = 0, count: int = 50, max_n: int = 12) -> list[CspInstance]:
    rng = random.Random(seed)
    suite = []
    while len(suite) < count:
        n = rng.randint(3, max_n)
        inst = planted_one_in_three(rng, n, rng.randint(1, max(1, n // 2 + 1)))
        if inst.constraints:
            suite.append(inst)
    return suite


def planted_cnf(rng: random.Random, n: int, m: int, max_width: int = 3) -> CspInstance:
    """Random clauses over distinct variables, each satisfied by a hidden assignment."""
    planted = [rng.randrange(2) for _ in range(n)]
    clauses = []
    for _ in range(m):
        scope = rng.sample(range(n), rng.randint(1, min(max_width, n)))
        signs = [rng.choice((True, False)) for _ in scope]
        if not any((planted[v] == 1) == s for v, s in zip(scope, signs)):
            i = rng.randrange(len(scope))
            signs[i] = not signs[i]
        clauses.append(clause(*((v + 1) if s else -(v + 1) for v, s in zip(scope, signs))))
    return CspInstance(n, Domain.boolean(), clauses)


def sat_suite(seed: int = 0, count: int = 40, max_n: int = 5, max_m: int = 8) -> list[CspInstance]:
    rng = random.Random(seed)
    return [planted_cnf(rng, rng.randint(1, max_n), rng.randint(1, max_m)) for _ in range(count)]


def cnf_suite(seed: int = 0, count: int = 30, max_n: int = 8, max_m: int = 10) -> list[CspInstance]:
    """Small CNFs (satisfiable and otherwise) for comparing cover predicates, plus the 8-variable counterexample."""
    rng = random.Random(seed)
    suite = [build_counterexample_phi1()]
    for _ in range(count):
        n = rng.randint(2, max_n)
        m = rng.randint(1, max_m)
        clauses = []
        for _ in range(m):
            scope = rng.sample(range(n), rng.randint(1, min(3, n)))
            clauses.append(clause(*((v + 1) * rng.choice((1, -1)) for v in scope)))
        suite.append(CspInstance(n, Domain.boolean(), clauses))
    return suite


def _disjoint(n: int, components: list[list[tuple[int, int]]]) -> Graph:
    edges, base = [], 0
    for comp in components:
        size = 1 + max(max(e) for e in comp)
        edges += [(u + base, v + base) for u, v in comp]
        base += size
    if base > n:
        raise ValueError("components exceed the vertex count")
    return Graph.from_edges(n, edges)


TRIANGLE = [(0, 1), (1, 2), (0, 2)]
P3 = [(0, 1), (1, 2)]
P2 = [(0, 1)]


def pgb_suite(seed: int = 0, n: int = 10, random_count: int = 4) -> list[Graph]:
    """Graphs on ``n`` vertices whose perfect bisections fall in at least two sign classes."""
    from .reductions import perfect_bisections

    fixed = [
        _disjoint(n, [P2]),
        _disjoint(n, [TRIANGLE, TRIANGLE]),
        _disjoint(n, [TRIANGLE, TRIANGLE, P2]),
        _disjoint(n, [P3, P3, P2, P2]),
    ]
    rng = random.Random(seed)
    extra: list[Graph] = []
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for _ in range(200):
        if len(extra) >= random_count:
            break
        g = Graph.from_edges(n, rng.sample(pairs, rng.randint(2, 6)))
        if len(perfect_bisections(g)) >= 2 and g not in extra and g not in fixed:
            extra.append(g)
    return [g for g in fixed + extra if len(perfect_bisections(g)) >= 2]
