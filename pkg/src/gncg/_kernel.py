"""Scaled numeric kernel shared by cost, best-response and optimum routines.

Exact hosts are rescaled so that every weight, every edge price ``alpha * w``
and every distance sum is an integer.  Those integers are stored in float64
arrays whenever the largest reachable sum stays below 2**53 (where float64
integer arithmetic is exact); otherwise Python ints in object arrays are used.
Float hosts keep their raw values and compare with a tolerance.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce

import numpy as np

INF = math.inf
_EXACT_LIMIT = 2**53


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


class Kernel:
    """Integer-scaled prices and lengths of a host graph at a fixed ``alpha``.

    A scaled cost ``c`` corresponds to the true value ``c / unit``.  ``length``
    is used for distances and ``price`` for edge costs, so an agent's scaled
    cost is ``price[u, S].sum() + (scaled distances).sum()``.
    """

    def __init__(self, host, alpha=1):
        n = host.n
        self.n = n
        self.exact = host.exact
        if self.exact:
            alpha = Fraction(alpha)
            if alpha <= 0:
                raise ValueError("alpha must be positive")
            finite = [w for row in host.weights for w in row if w != INF]
            scale = reduce(_lcm, (w.denominator for w in finite), 1)
            a_num, a_den = alpha.numerator, alpha.denominator
            total = sum(int(w * scale) for w in finite)
            bound = (a_num + a_den) * (n + 1) ** 2 * max(total, 1) * 4
            dtype = np.float64 if bound < _EXACT_LIMIT else object
            base = np.empty((n, n), dtype=object)
            for u in range(n):
                for v in range(n):
                    w = host.weights[u][v]
                    base[u, v] = INF if w == INF else int(w * scale)
            self.length = (base * a_den).astype(dtype)
            self.price = (base * a_num).astype(dtype)
            self.unit = scale * a_den
            self.tol = 0
        else:
            alpha = float(alpha)
            if alpha <= 0:
                raise ValueError("alpha must be positive")
            base = np.array([[float(w) for w in row] for row in host.weights], dtype=np.float64)
            self.length = base
            self.price = base * alpha
            self.unit = 1
            self.tol = host.eps
        self.alpha = alpha
        self.dtype = self.length.dtype

    # -- conversions -------------------------------------------------------

    def value(self, x):
        """Convert a scaled scalar back to a Fraction (exact) or float."""
        if x == INF:
            return INF
        if self.exact:
            return Fraction(int(x), self.unit)
        return float(x)

    def values(self, arr) -> np.ndarray:
        out = np.empty(np.shape(arr), dtype=object if self.exact else np.float64)
        for idx in np.ndindex(out.shape):
            out[idx] = self.value(arr[idx])
        return out

    def improves(self, before, after) -> bool:
        """True when ``after`` is strictly cheaper than ``before`` beyond the tolerance."""
        if after == INF:
            return False
        if before == INF:
            return True
        return before - after > self.tol

    def same(self, a, b) -> bool:
        if a == INF or b == INF:
            return a == b
        return abs(a - b) <= self.tol

    # -- graph helpers -----------------------------------------------------

    def empty_adjacency(self) -> np.ndarray:
        adj = np.full((self.n, self.n), INF, dtype=self.dtype)
        np.fill_diagonal(adj, 0)
        return adj

    def adjacency(self, edges) -> np.ndarray:
        adj = self.empty_adjacency()
        for u, v in edges:
            adj[u, v] = adj[v, u] = self.length[u, v]
        return adj


def floyd_warshall(adj: np.ndarray) -> np.ndarray:
    """All-pairs shortest paths over the last two axes (batched)."""
    d = adj.copy()
    n = d.shape[-1]
    for k in range(n):
        d = np.minimum(d, d[..., :, k : k + 1] + d[..., k : k + 1, :])
    return d
