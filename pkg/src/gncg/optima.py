"""Social optima and minimum-weight spanners.

Under single ownership the social cost depends only on the edge set, so the
exhaustive routines enumerate the ``2**(n(n-1)/2)`` edge subsets of the host
in vectorized batches.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from gncg._kernel import INF, Kernel, floyd_warshall
from gncg.equilibria import DEFAULT_BR_CAP, is_nash
from gncg.errors import CapExceededError, ConstraintError
from gncg.game import Network, StrategyProfile, edge_set_cost, network_from_edges
from gncg.hostgraph import HostGraph, Weight

log = logging.getLogger(__name__)

DEFAULT_OPT_CAP = 7
DEFAULT_ORIENTATION_CAP = 18
_BATCH_BITS = 15


@dataclass(frozen=True)
class EdgeSet:
    """Edges of a subgraph, each paid once, with its social cost at ``alpha``."""

    edges: tuple[tuple[int, int], ...]
    total_weight: Weight
    social_cost: Weight
    alpha: Weight

    def network(self, host: HostGraph) -> Network:
        return network_from_edges(host, self.edges)

    def to_dict(self) -> dict:
        return {
            "edges": [list(e) for e in self.edges],
            "total_weight": self.total_weight,
            "social_cost": self.social_cost,
            "alpha": self.alpha,
        }


def make_edge_set(host: HostGraph, edges: Iterable[tuple[int, int]], alpha) -> EdgeSet:
    edges = tuple(sorted({(min(u, v), max(u, v)) for u, v in edges}))
    zero = Fraction(0) if host.exact else 0.0
    total = sum((host.w(u, v) for u, v in edges), zero)
    alpha = Fraction(alpha) if host.exact else float(alpha)
    return EdgeSet(edges, total, edge_set_cost(host, edges, alpha), alpha)


def _batches(n_edges: int):
    """Yield ``(masks, bits)`` covering every subset of ``n_edges`` edges."""
    total = 1 << n_edges
    step = 1 << min(n_edges, _BATCH_BITS)
    shifts = np.arange(n_edges, dtype=np.int64)
    for start in range(0, total, step):
        masks = np.arange(start, min(start + step, total), dtype=np.int64)
        yield masks, (masks[:, None] >> shifts[None, :]) & 1 == 1


def _subset_distances(kernel: Kernel, pairs, bits) -> np.ndarray:
    n = kernel.n
    adj = np.full((bits.shape[0], n, n), INF, dtype=kernel.dtype)
    idx = np.arange(n)
    adj[:, idx, idx] = 0
    for e, (u, v) in enumerate(pairs):
        col = np.where(bits[:, e], kernel.length[u, v], INF)
        adj[:, u, v] = col
        adj[:, v, u] = col
    return floyd_warshall(adj)


def _pick(kernel: Kernel, pairs, candidates):
    """Choose among ``(value, mask)`` pairs: fewest edges, then smallest edge list."""

    def key(item):
        mask = int(item[1])
        chosen = [i for i in range(len(pairs)) if mask >> i & 1]
        return (len(chosen), chosen)

    value, mask = min(candidates, key=key)
    return value, [pairs[i] for i in range(len(pairs)) if int(mask) >> i & 1]


def _minimize(kernel: Kernel, pairs, objective):
    """Generic subset minimization; ``objective(bits, masks)`` returns scaled values (inf = infeasible)."""
    best = INF
    near: list[tuple[object, int]] = []
    for masks, bits in _batches(len(pairs)):
        vals = objective(bits, masks)
        vmin = vals.min()
        if vmin == INF:
            continue
        if best == INF or vmin < best:
            best = vmin
        for i in np.nonzero(vals <= best + kernel.tol)[0]:
            near.append((vals[i], masks[i]))
    if best == INF:
        return INF, None
    near = [(c, m) for c, m in near if c <= best + kernel.tol]
    return _pick(kernel, pairs, near)


def optimum_exact(host: HostGraph, alpha, cap: int = DEFAULT_OPT_CAP) -> tuple[EdgeSet, Weight]:
    """Edge set minimizing ``alpha * sum(w) + sum of all distances`` by enumeration, with its cost."""
    if host.n > cap:
        raise CapExceededError("exact optimum", host.n, cap)
    k = Kernel(host, alpha)
    pairs = list(host.pairs())
    prices = np.array([k.price[u, v] for u, v in pairs], dtype=k.dtype)

    def objective(bits, masks):
        d = _subset_distances(k, pairs, bits)
        paid = np.where(bits, prices[None, :], 0).sum(axis=1)
        return paid + d.sum(axis=(1, 2))

    _, edges = _minimize(k, pairs, objective)
    opt = make_edge_set(host, edges, alpha)
    return opt, opt.social_cost


def optimum_one_two(host: HostGraph, alpha) -> EdgeSet:
    """Start from the complete graph and drop the 2-edge of every 1-1-2 triangle."""
    if host.kind != "one-two":
        raise ConstraintError(f"optimum_one_two needs a one-two host, got {host.kind}")
    alpha = Fraction(alpha)
    if not 0 < alpha <= 1:
        raise ConstraintError("optimum_one_two needs 0 < alpha <= 1")
    n = host.n
    edges = set(host.pairs())
    changed = True
    while changed:
        changed = False
        for u, v in sorted(edges):
            if host.w(u, v) != 2:
                continue
            for x in range(n):
                if x in (u, v):
                    continue
                a, b = (min(u, x), max(u, x)), (min(v, x), max(v, x))
                if a in edges and b in edges and host.w(*a) == 1 and host.w(*b) == 1:
                    edges.discard((u, v))
                    changed = True
                    break
    return make_edge_set(host, edges, alpha)


def optimum_tree(host: HostGraph, alpha=1) -> EdgeSet:
    """The tree that defines a tree metric."""
    if host.kind != "tree" or host.tree_edges is None:
        raise ConstraintError(f"optimum_tree needs a tree host, got {host.kind}")
    return make_edge_set(host, [(u, v) for u, v, _ in host.tree_edges], alpha)


def min_weight_spanner(host: HostGraph, k, cap: int = DEFAULT_OPT_CAP) -> EdgeSet:
    """Minimum-weight edge set with stretch at most ``k`` (``k = inf`` means connected)."""
    if host.n > cap:
        raise CapExceededError("minimum-weight spanner", host.n, cap)
    kern = Kernel(host, 1)
    pairs = list(host.pairs())
    weights = np.array([kern.length[u, v] for u, v in pairs], dtype=kern.dtype)
    dh = floyd_warshall(kern.length)
    if k == INF or (isinstance(k, float) and math.isinf(k)):
        def feasible(d):
            return (d != INF).all(axis=(1, 2))
    elif kern.exact:
        kf = Fraction(k)
        limit = dh * kf.numerator

        def feasible(d):
            return (d * kf.denominator <= limit[None]).all(axis=(1, 2))
    else:
        limit = dh * float(k) + kern.tol

        def feasible(d):
            return (d <= limit[None]).all(axis=(1, 2))

    def objective(bits, masks):
        d = _subset_distances(kern, pairs, bits)
        total = np.where(bits, weights[None, :], 0).sum(axis=1)
        ok = feasible(d)
        return np.where(ok, total, INF)

    _, edges = _minimize(kern, pairs, objective)
    if edges is None:
        raise ValueError("no spanner satisfies the requested stretch")
    return make_edge_set(host, edges, 1)


def spanner_ne_ownership(host: HostGraph, spanner: EdgeSet, alpha, cap: int = DEFAULT_ORIENTATION_CAP) -> StrategyProfile | None:
    """Search all single-owner orientations of ``spanner`` for one that is a NE.

    Orientation bit ``i`` set means the larger endpoint of edge ``i`` owns it.
    Returns the first NE found, or ``None`` (logged as a warning).
    """
    if host.kind != "one-two":
        raise ConstraintError("spanner_ne_ownership needs a one-two host")
    alpha = Fraction(alpha)
    if not Fraction(1, 2) <= alpha <= 1:
        raise ConstraintError("spanner_ne_ownership needs 1/2 <= alpha <= 1")
    edges = list(spanner.edges)
    if len(edges) > cap:
        raise CapExceededError("spanner orientations", len(edges), cap)
    if host.n > DEFAULT_BR_CAP:
        raise CapExceededError("exact best response", host.n, DEFAULT_BR_CAP)
    kern = Kernel(host, alpha)
    for mask in range(1 << len(edges)):
        owned = [(v, u) if mask >> i & 1 else (u, v) for i, (u, v) in enumerate(edges)]
        profile = StrategyProfile.from_owned(host.n, owned)
        if is_nash(host, profile, alpha, kern):
            return profile
    log.warning("no NE orientation of a %d-edge spanner found at alpha=%s", len(edges), alpha)
    return None
