"""Slow, independent reference implementations used to cross-check the library.

Everything here is plain Python over ``Fraction`` weight matrices (lists of
lists) and never touches the library's scaled numpy kernel.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

INF = math.inf


def apsp(n, edges, w):
    """Floyd-Warshall on an explicit edge list; ``w`` is the host matrix."""
    d = [[INF] * n for _ in range(n)]
    for i in range(n):
        d[i][i] = Fraction(0)
    for u, v in edges:
        d[u][v] = d[v][u] = min(d[u][v], w[u][v])
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def edges_of(strategies):
    return {(min(u, v), max(u, v)) for u, s in enumerate(strategies) for v in s}


def agent_cost(w, strategies, u, alpha):
    n = len(w)
    d = apsp(n, edges_of(strategies), w)
    dist = sum(d[u])
    edge = alpha * sum((w[u][v] for v in strategies[u]), Fraction(0))
    return edge + dist


def social_cost(w, strategies, alpha):
    return sum(agent_cost(w, strategies, u, alpha) for u in range(len(w)))


def edge_set_cost(w, edges, alpha):
    n = len(w)
    d = apsp(n, edges, w)
    return alpha * sum((w[u][v] for u, v in edges), Fraction(0)) + sum(sum(r) for r in d)


def best_response(w, strategies, u, alpha):
    """``(cost, strategy)`` with ties to fewest edges, then lexicographically smallest."""
    n = len(w)
    others = [x for x in range(n) if x != u]
    best = None
    for size in range(n):
        for combo in itertools.combinations(others, size):
            s = list(strategies)
            s[u] = frozenset(combo)
            c = agent_cost(w, s, u, alpha)
            if best is None or c < best[0]:
                best = (c, frozenset(combo))
    return best


def is_nash(w, strategies, alpha):
    for u in range(len(w)):
        cur = agent_cost(w, strategies, u, alpha)
        best, _ = best_response(w, strategies, u, alpha)
        if best < cur:
            return False
    return True


def optimum(w, alpha):
    """Minimum social cost over all edge subsets (each edge paid once)."""
    n = len(w)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    best = INF
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        best = min(best, edge_set_cost(w, edges, alpha))
    return best


def host_paths(w):
    n = len(w)
    return apsp(n, [(u, v) for u in range(n) for v in range(u + 1, n) if w[u][v] != INF], w)


def min_set_cover_size(universe, sets):
    target = set(universe)
    for k in range(1, len(sets) + 1):
        for combo in itertools.combinations(range(len(sets)), k):
            if set().union(*(set(sets[i]) for i in combo)) == target:
                return k
    raise ValueError("no cover")


def is_set_cover(universe, sets, chosen):
    return set().union(*(set(sets[i]) for i in chosen)) == set(universe) if chosen else not universe


def min_vertex_cover_size(edges):
    vertices = sorted({x for e in edges for x in e})
    for k in range(len(vertices) + 1):
        for c in itertools.combinations(vertices, k):
            if all(a in c or b in c for a, b in edges):
                return k
    return len(vertices)
