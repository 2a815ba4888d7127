"""Complete weighted host graphs.

A host is an immutable symmetric weight matrix plus a tag describing where
the weights came from.  Exact hosts hold :class:`fractions.Fraction` weights;
hosts built from p-norms with ``p != 1`` hold floats and compare with a
tolerance ``eps``.  ``math.inf`` is accepted as a weight in general hosts to
model pairs that cannot be connected directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from gncg._kernel import INF, Kernel, floyd_warshall
from gncg.errors import InvalidHostError

Weight = Union[Fraction, float]

DEFAULT_EPS = 1e-9
KINDS = ("general", "metric", "one-two", "tree", "points")
METRIC_KINDS = ("metric", "one-two", "tree", "points")


def as_weight(x) -> Weight:
    """Parse a scalar into an exact weight.

    Accepts ints, Fractions, ``{"num": p, "den": q}`` mappings, decimal or
    ``"p/q"`` strings, ``"inf"`` and floats (read through their shortest
    decimal repr, so ``0.1`` becomes ``1/10``).
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not weights")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, dict):
        return Fraction(int(x["num"]), int(x["den"]))
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return INF
        return Fraction(s)
    if isinstance(x, float):
        if math.isinf(x) and x > 0:
            return INF
        if math.isnan(x) or math.isinf(x):
            raise ValueError(f"not a weight: {x!r}")
        return Fraction(repr(x))
    if isinstance(x, (np.integer,)):
        return Fraction(int(x))
    if isinstance(x, np.floating):
        return as_weight(float(x))
    raise TypeError(f"cannot interpret {x!r} as a weight")


@dataclass(frozen=True)
class PointSet:
    p: Fraction
    coords: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.coords[0])


@dataclass(frozen=True)
class Violation:
    """Triangle-inequality violation ``w(u,v) > w(u,x) + w(x,v)`` by ``slack``."""

    u: int
    x: int
    v: int
    slack: Weight


@dataclass(frozen=True)
class HostGraph:
    weights: tuple[tuple[Weight, ...], ...]
    kind: str = "general"
    tree_edges: tuple[tuple[int, int, Fraction], ...] | None = None
    points: PointSet | None = None
    eps: float = field(default=DEFAULT_EPS, compare=False)

    @property
    def n(self) -> int:
        return len(self.weights)

    @cached_property
    def exact(self) -> bool:
        return all(isinstance(w, Fraction) or w == INF for row in self.weights for w in row)

    @property
    def is_metric_kind(self) -> bool:
        return self.kind in METRIC_KINDS

    def w(self, u: int, v: int) -> Weight:
        return self.weights[u][v]

    def matrix(self) -> np.ndarray:
        return np.array(self.weights, dtype=object if self.exact else np.float64)

    @cached_property
    def dH(self) -> np.ndarray:
        return host_shortest_paths(self)

    def pairs(self):
        for u in range(self.n):
            for v in range(u + 1, self.n):
                yield u, v

    def scaled(self, c) -> "HostGraph":
        """The same host with every weight multiplied by ``c > 0``."""
        c = Fraction(c) if self.exact else float(c)
        if c <= 0:
            raise ValueError("scale factor must be positive")
        weights = tuple(tuple(w * c if w != INF else INF for w in row) for row in self.weights)
        tree = None
        if self.tree_edges is not None:
            tree = tuple((u, v, w * c) for u, v, w in self.tree_edges)
        points = None
        if self.points is not None:
            points = PointSet(self.points.p, tuple(tuple(x * Fraction(c) for x in pt) for pt in self.points.coords))
        return replace(self, weights=weights, tree_edges=tree, points=points)

    def kernel(self, alpha=1) -> Kernel:
        return Kernel(self, alpha)


def _validate_matrix(weights: Sequence[Sequence], n: int | None) -> tuple[tuple[Weight, ...], ...]:
    rows = [list(r) for r in weights]
    if n is None:
        n = len(rows)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise InvalidHostError(f"weight matrix must be {n}x{n}")
    if n < 1:
        raise InvalidHostError("host needs at least one node")
    parsed = [[as_weight(x) for x in r] for r in rows]
    for u in range(n):
        if parsed[u][u] != 0:
            raise InvalidHostError(f"nonzero diagonal at ({u},{u})", (u, u))
        for v in range(n):
            if parsed[u][v] < 0:
                raise InvalidHostError(f"negative weight at ({u},{v})", (u, v))
    for u in range(n):
        for v in range(u + 1, n):
            if parsed[u][v] != parsed[v][u]:
                raise InvalidHostError(f"asymmetric weights at ({u},{v})", (u, v))
    return tuple(tuple(r) for r in parsed)


def build_general(weights: Sequence[Sequence], n: int | None = None, classify: bool = False) -> HostGraph:
    """Validate a raw symmetric matrix.

    With ``classify=True`` the host is re-tagged ``metric`` when the triangle
    inequality holds everywhere.
    """
    host = HostGraph(_validate_matrix(weights, n))
    if classify and not check_metric(host):
        host = replace(host, kind="metric")
    return host


def build_one_two(weights: Sequence[Sequence], n: int | None = None) -> HostGraph:
    parsed = _validate_matrix(weights, n)
    for u in range(len(parsed)):
        for v in range(len(parsed)):
            if u != v and parsed[u][v] not in (1, 2):
                raise InvalidHostError(f"weight at ({u},{v}) is not 1 or 2", (u, v))
    return HostGraph(parsed, kind="one-two")


def check_metric(host: HostGraph) -> list[Violation]:
    """All triples ``(u, x, v)`` with ``u < v`` violating the triangle inequality."""
    n = host.n
    tol = 0 if host.exact else host.eps
    out = []
    for u in range(n):
        for v in range(u + 1, n):
            wuv = host.weights[u][v]
            for x in range(n):
                if x == u or x == v:
                    continue
                detour = host.weights[u][x] + host.weights[x][v]
                if wuv > detour and (wuv == INF or wuv - detour > tol):
                    out.append(Violation(u, x, v, wuv - detour))
    return out


def _norm(diff: Sequence[Fraction], p: Fraction) -> Weight:
    if p == 1:
        return sum((abs(d) for d in diff), Fraction(0))
    if p == 2:
        return math.sqrt(float(sum((d * d for d in diff), Fraction(0))))
    if p.denominator == 1:
        total = sum((abs(d) ** int(p) for d in diff), Fraction(0))
        return float(total) ** (1.0 / float(p))
    return sum(float(abs(d)) ** float(p) for d in diff) ** (1.0 / float(p))


def from_points(coords: Sequence[Sequence], p=1, eps: float = DEFAULT_EPS) -> HostGraph:
    """Host on points in R^d with p-norm weights.

    ``p = 1`` gives exact rational weights; any other ``p >= 1`` gives floats.
    """
    if len(coords) == 0:
        raise InvalidHostError("empty point list")
    p = Fraction(p)
    if p < 1:
        raise InvalidHostError("p must be at least 1")
    pts = tuple(tuple(as_weight(x) for x in pt) for pt in coords)
    d = len(pts[0])
    for i, pt in enumerate(pts):
        if len(pt) != d:
            raise InvalidHostError(f"point {i} has dimension {len(pt)}, expected {d}")
        if any(x == INF for x in pt):
            raise InvalidHostError(f"point {i} has an infinite coordinate")
    n = len(pts)
    zero = Fraction(0) if p == 1 else 0.0
    w = [[zero] * n for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            w[u][v] = w[v][u] = _norm([a - b for a, b in zip(pts[u], pts[v])], p)
    return HostGraph(tuple(tuple(r) for r in w), kind="points", points=PointSet(p, pts), eps=eps)


def from_tree(n: int, tree_edges: Sequence[Sequence]) -> HostGraph:
    """Metric closure of a weighted spanning tree on nodes ``0..n-1``."""
    edges = []
    for e in tree_edges:
        u, v, w = int(e[0]), int(e[1]), as_weight(e[2])
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise InvalidHostError(f"bad tree edge ({u},{v})", (u, v))
        if not (0 < w < INF):
            raise InvalidHostError(f"tree edge ({u},{v}) needs a positive finite weight", (u, v))
        edges.append((u, v, w))
    if len(edges) != n - 1:
        raise InvalidHostError(f"a spanning tree on {n} nodes has {n - 1} edges, got {len(edges)}")
    adj: list[list[tuple[int, Fraction]]] = [[] for _ in range(n)]
    for u, v, w in edges:
        adj[u].append((v, w))
        adj[v].append((u, w))
    dist = [[None] * n for _ in range(n)]
    for s in range(n):
        dist[s][s] = Fraction(0)
        stack = [s]
        while stack:
            x = stack.pop()
            for y, w in adj[x]:
                if dist[s][y] is None:
                    dist[s][y] = dist[s][x] + w
                    stack.append(y)
        if any(d is None for d in dist[s]):
            raise InvalidHostError("tree edges do not connect all nodes (so they contain a cycle)")
    return HostGraph(tuple(tuple(r) for r in dist), kind="tree", tree_edges=tuple(edges))


def host_shortest_paths(host: HostGraph) -> np.ndarray:
    """Shortest-path distances in the complete host graph ``H``."""
    if host.is_metric_kind:
        return host.matrix()
    k = host.kernel()
    return k.values(floyd_warshall(k.length))


def metric_closure(weights: Sequence[Sequence]) -> HostGraph:
    host = build_general(weights)
    d = host_shortest_paths(host)
    return HostGraph(tuple(tuple(row) for row in d.tolist()), kind="metric")


# -- random instances ---------------------------------------------------------


def random_general(n: int, rng: np.random.Generator, low: int = 0, high: int = 9, non_metric: bool = False) -> HostGraph:
    """Random integer weights in ``[low, high]``; optionally resampled until non-metric."""
    while True:
        w = [[Fraction(0)] * n for _ in range(n)]
        for u in range(n):
            for v in range(u + 1, n):
                w[u][v] = w[v][u] = Fraction(int(rng.integers(low, high + 1)))
        host = HostGraph(tuple(tuple(r) for r in w))
        if not non_metric or check_metric(host):
            return host


def random_metric(n: int, rng: np.random.Generator, high: int = 10) -> HostGraph:
    """Metric closure of random integer weights in ``[1, high]``."""
    w = [[0] * n for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            w[u][v] = w[v][u] = int(rng.integers(1, high + 1))
    return metric_closure(w)


def random_one_two(n: int, rng: np.random.Generator, p_one: float = 0.5) -> HostGraph:
    w = [[0] * n for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            w[u][v] = w[v][u] = 1 if rng.random() < p_one else 2
    return build_one_two(w)


def random_tree(n: int, rng: np.random.Generator, high: int = 5) -> HostGraph:
    """Random attachment tree with integer edge weights in ``[1, high]``."""
    order = [int(x) for x in rng.permutation(n)]
    edges = []
    for i in range(1, n):
        parent = order[int(rng.integers(0, i))]
        edges.append((parent, order[i], int(rng.integers(1, high + 1))))
    return from_tree(n, edges)
