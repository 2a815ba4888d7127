"""Strategy profiles, induced networks, agent and social cost, stretch."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from gncg._kernel import INF, Kernel, floyd_warshall
from gncg.errors import InvalidProfileError
from gncg.hostgraph import HostGraph, Weight


@dataclass(frozen=True)
class StrategyProfile:
    """Per-agent sets of owned targets; ``strategies[u]`` is ``S_u``."""

    strategies: tuple[frozenset[int], ...]

    @classmethod
    def from_lists(cls, lists: Sequence[Iterable[int]]) -> "StrategyProfile":
        return cls(tuple(frozenset(int(v) for v in s) for s in lists))

    @classmethod
    def empty(cls, n: int) -> "StrategyProfile":
        return cls(tuple(frozenset() for _ in range(n)))

    @classmethod
    def from_owned(cls, n: int, owned: Iterable[tuple[int, int]]) -> "StrategyProfile":
        """Build from ``(owner, target)`` pairs."""
        sets: list[set[int]] = [set() for _ in range(n)]
        for owner, target in owned:
            sets[owner].add(target)
        return cls(tuple(frozenset(s) for s in sets))

    @property
    def n(self) -> int:
        return len(self.strategies)

    def __getitem__(self, u: int) -> frozenset[int]:
        return self.strategies[u]

    def with_strategy(self, u: int, strategy: Iterable[int]) -> "StrategyProfile":
        s = list(self.strategies)
        s[u] = frozenset(strategy)
        return StrategyProfile(tuple(s))

    def owned_pairs(self) -> list[tuple[int, int]]:
        return [(u, v) for u, s in enumerate(self.strategies) for v in sorted(s)]

    def edges(self) -> set[tuple[int, int]]:
        return {(min(u, v), max(u, v)) for u, v in self.owned_pairs()}

    def double_owned(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u, s in enumerate(self.strategies) for v in s if u < v and u in self.strategies[v])

    def key(self) -> tuple[tuple[int, ...], ...]:
        """Canonical hashable encoding (includes ownership)."""
        return tuple(tuple(sorted(s)) for s in self.strategies)

    def to_lists(self) -> list[list[int]]:
        return [sorted(s) for s in self.strategies]

    def validate(self, n: int) -> None:
        if self.n != n:
            raise InvalidProfileError(f"profile has {self.n} agents, host has {n}")
        for u, s in enumerate(self.strategies):
            for v in s:
                if v == u:
                    raise InvalidProfileError(f"agent {u} targets itself")
                if not 0 <= v < n:
                    raise InvalidProfileError(f"agent {u} targets out-of-range node {v}")


@dataclass(frozen=True)
class CostBreakdown:
    edge_cost: Weight
    distance_cost: Weight
    total: Weight


@dataclass(frozen=True, eq=False)
class Network:
    """Undirected subgraph of a host with per-edge owner sets.

    Edges built from an :class:`EdgeSet` carry an empty owner set.
    """

    host: HostGraph
    owners: dict

    @property
    def n(self) -> int:
        return self.host.n

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.owners)

    @property
    def double_owned(self) -> list[tuple[int, int]]:
        return [e for e in self.edges if len(self.owners[e]) > 1]

    @cached_property
    def dist(self) -> np.ndarray:
        k = Kernel(self.host)
        return k.values(floyd_warshall(k.adjacency(self.edges)))

    @property
    def total_weight(self) -> Weight:
        return sum((self.host.w(u, v) for u, v in self.edges), Fraction(0) if self.host.exact else 0.0)

    @property
    def is_connected(self) -> bool:
        return all(d != INF for d in self.dist.flat)

    def is_forest(self) -> bool:
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True


def induced_network(host: HostGraph, profile: StrategyProfile) -> Network:
    profile.validate(host.n)
    owners: dict[tuple[int, int], set[int]] = {}
    for u, v in profile.owned_pairs():
        owners.setdefault((min(u, v), max(u, v)), set()).add(u)
    return Network(host, {e: frozenset(o) for e, o in owners.items()})


def network_from_edges(host: HostGraph, edges: Iterable[tuple[int, int]]) -> Network:
    return Network(host, {(min(u, v), max(u, v)): frozenset() for u, v in edges})


def distances(network: Network) -> np.ndarray:
    """Shortest-path distances in the network, ``inf`` between components."""
    return network.dist


def _scaled_costs(kernel: Kernel, profile: StrategyProfile) -> tuple[np.ndarray, np.ndarray]:
    """Scaled (edge cost, distance cost) arrays for every agent."""
    n = kernel.n
    d = floyd_warshall(kernel.adjacency(profile.edges()))
    edge = np.array([kernel.price[u, sorted(profile[u])].sum() if profile[u] else 0 for u in range(n)], dtype=kernel.dtype)
    return edge, d.sum(axis=1)


def agent_cost(host: HostGraph, profile: StrategyProfile, u: int, alpha) -> CostBreakdown:
    """``alpha * w(u, S_u) + d_G(u, V)``."""
    profile.validate(host.n)
    k = Kernel(host, alpha)
    edge, dist = _scaled_costs(k, profile)
    return CostBreakdown(k.value(edge[u]), k.value(dist[u]), k.value(edge[u] + dist[u]))


def agent_costs(host: HostGraph, profile: StrategyProfile, alpha) -> list[CostBreakdown]:
    profile.validate(host.n)
    k = Kernel(host, alpha)
    edge, dist = _scaled_costs(k, profile)
    return [CostBreakdown(k.value(e), k.value(d), k.value(e + d)) for e, d in zip(edge, dist)]


def social_cost(host: HostGraph, profile: StrategyProfile, alpha) -> Weight:
    profile.validate(host.n)
    k = Kernel(host, alpha)
    edge, dist = _scaled_costs(k, profile)
    return k.value(edge.sum() + dist.sum())


def edge_set_cost(host: HostGraph, edges: Iterable[tuple[int, int]], alpha) -> Weight:
    """Social cost of an edge set with every edge paid exactly once."""
    k = Kernel(host, alpha)
    edges = list(edges)
    d = floyd_warshall(k.adjacency(edges))
    price = sum((k.price[u, v] for u, v in edges), 0)
    return k.value(price + d.sum())


def stretch(host: HostGraph, network: Network) -> Weight:
    """``max d_G(u,v) / d_H(u,v)`` over pairs; pairs with ``d_H = 0`` must have ``d_G = 0``."""
    dg, dh = network.dist, host.dH
    best = Fraction(1) if host.exact else 1.0
    tol = 0 if host.exact else host.eps
    for u, v in host.pairs():
        g, h = dg[u, v], dh[u, v]
        if g == INF:
            return INF
        if h <= tol:
            if g > tol:
                return INF
            continue
        best = max(best, g / h)
    return best


def pair_sigma(host: HostGraph, stable: Network, opt: Network, u: int, v: int, alpha) -> Weight:
    """Per-pair social cost ratio between a stable network and an optimum."""
    alpha = Fraction(alpha) if host.exact else float(alpha)
    e = (min(u, v), max(u, v))
    w = host.w(u, v)
    num = (alpha * w if e in stable.owners else 0) + 2 * stable.dist[u, v]
    den = (alpha * w if e in opt.owners else 0) + 2 * opt.dist[u, v]
    if den == 0:
        return INF if num > 0 else Fraction(1)
    return num / den


def all_single_owner_profiles(n: int):
    """Every profile in which each host edge is absent or owned by exactly one endpoint."""
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        sets: list[set[int]] = [set() for _ in range(n)]
        for (u, v), c in zip(pairs, choice):
            if c == 1:
                sets[u].add(v)
            elif c == 2:
                sets[v].add(u)
        yield StrategyProfile(tuple(frozenset(s) for s in sets))


class AgentView:
    """Scaled cost of one agent for arbitrary strategies, others held fixed.

    Distances are taken in ``G - u``; agent ``u`` reaches ``v`` through some
    neighbour ``x`` at cost ``w(u,x) + d_{G-u}(x,v)``.  Neighbours that own an
    edge to ``u`` are always available.
    """

    def __init__(self, kernel: Kernel, profile: StrategyProfile, u: int):
        n = kernel.n
        self.kernel = kernel
        self.u = u
        self.current = profile[u]
        adj = kernel.empty_adjacency()
        for a, b in profile.edges():
            if u not in (a, b):
                adj[a, b] = adj[b, a] = kernel.length[a, b]
        d = floyd_warshall(adj)
        self.others = [x for x in range(n) if x != u]
        self.pos = {x: i for i, x in enumerate(self.others)}
        idx = np.array(self.others, dtype=int)
        self.M = kernel.length[u, idx][:, None] + d[np.ix_(idx, idx)]
        self.prices = kernel.price[u, idx]
        base = np.full(len(self.others), INF, dtype=kernel.dtype)
        for x in self.others:
            if u in profile[x]:
                base = np.minimum(base, self.M[self.pos[x]])
        self.base = base

    def cost(self, strategy: Iterable[int]):
        rows = [self.pos[x] for x in strategy]
        if not rows:
            return self.base.sum()
        reach = np.minimum(self.base, self.M[rows].min(axis=0))
        return self.prices[rows].sum() + reach.sum()

    def current_cost(self):
        return self.cost(self.current)
