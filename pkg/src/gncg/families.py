"""Lower-bound families and reduction instances with predicted costs.

Each generator returns an :class:`InstanceBundle`: a host, named single-owner
profiles and exact predictions tagged with the closed form they come from.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

from gncg.errors import ConstraintError
from gncg.game import StrategyProfile, social_cost
from gncg.hostgraph import HostGraph, Weight, build_general, build_one_two, from_points, from_tree
from gncg.optima import optimum_one_two

BRC_POINTS = ((3, 0), (0, 3), (2, 2), (0, 2), (1, 1), (4, 3), (2, 0), (4, 1), (1, 4), (1, 0))


@dataclass(frozen=True)
class Prediction:
    value: Weight
    formula: str


@dataclass
class InstanceBundle:
    name: str
    params: dict
    host: HostGraph
    profiles: dict[str, StrategyProfile]
    predictions: dict[str, Prediction]
    agent: int | None = None
    extra: dict = field(default_factory=dict)

    def measured_cost(self, profile: str, alpha=None) -> Weight:
        """Social cost of a named profile at the bundle's ``alpha`` (or the one given)."""
        a = self.params.get("alpha", 1) if alpha is None else alpha
        return social_cost(self.host, self.profiles[profile], a)


def _positive(alpha) -> Fraction:
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ConstraintError("alpha must be positive")
    return alpha


# -- PoA lower-bound families -------------------------------------------------


def tree_star_family(n: int, alpha) -> InstanceBundle:
    """Star with one edge of weight 1 and ``n - 2`` edges of weight ``2/alpha``.

    Node 0 is the center ``u``, node 1 the endpoint ``v`` of the unit edge.
    OPT is the star owned by ``u``; the NE is the star centered at ``v``, owned by ``v``.
    """
    if n < 3:
        raise ConstraintError("tree_star_family needs n >= 3")
    alpha = _positive(alpha)
    far = 2 / alpha
    host = from_tree(n, [(0, 1, 1)] + [(0, i, far) for i in range(2, n)])
    opt = StrategyProfile.from_owned(n, [(0, i) for i in range(1, n)])
    ne = StrategyProfile.from_owned(n, [(1, i) for i in range(n) if i != 1])
    c_opt = (2 * n + alpha - 2) * ((n - 2) * far + 1)
    c_ne = (2 * n + alpha - 2) * ((n - 2) * (1 + far) + 1)
    preds = {
        "cost_OPT": Prediction(c_opt, "(2n+a-2)((n-2)(2/a)+1)"),
        "cost_NE": Prediction(c_ne, "(2n+a-2)((n-2)(1+2/a)+1)"),
        "ratio": Prediction(c_ne / c_opt, "cost_NE/cost_OPT"),
        "bound": Prediction((alpha + 2) / 2, "(a+2)/2"),
    }
    return InstanceBundle("tree-star", {"n": n, "alpha": alpha}, host, {"OPT": opt, "NE": ne}, preds)


def geometric_path_family(n: int, alpha) -> InstanceBundle:
    """Path on ``n + 1`` collinear points at positions ``(1 + 2/alpha)**(i-1)`` (and 0).

    OPT is the path with ``v_{i-1}`` owning ``(v_{i-1}, v_i)``; NE is the star owned by ``v_0``.
    """
    if n < 1:
        raise ConstraintError("geometric_path_family needs n >= 1")
    alpha = _positive(alpha)
    q = 1 + 2 / alpha
    pos = [Fraction(0)] + [q ** (i - 1) for i in range(1, n + 1)]
    host = from_points([(x,) for x in pos], p=1)
    path = StrategyProfile.from_owned(n + 1, [(i - 1, i) for i in range(1, n + 1)])
    star = StrategyProfile.from_owned(n + 1, [(0, i) for i in range(1, n + 1)])
    gaps = [pos[i] - pos[i - 1] for i in range(1, n + 1)]
    c_path = alpha * pos[n] + 2 * sum(g * i * (n + 1 - i) for i, g in enumerate(gaps, start=1))
    c_star = (2 * n + alpha) * (alpha / 2) * (q**n - 1)
    preds = {
        "cost_OPT": Prediction(c_path, "a*w(v0,vn) + 2*sum_i w_i*i*(n+1-i)"),
        "cost_NE": Prediction(c_star, "(2n+a)(a/2)((1+2/a)^n-1)"),
        "ratio": Prediction(c_star / c_path, "cost_NE/cost_OPT"),
    }
    return InstanceBundle("geometric-path", {"n": n, "alpha": alpha}, host, {"OPT": path, "NE": star}, preds)


def four_node_family(alpha) -> InstanceBundle:
    alpha = _positive(alpha)
    b = geometric_path_family(3, alpha)
    a = alpha
    num = 3 * a**3 + 24 * a**2 + 40 * a + 24
    den = a**3 + 10 * a**2 + 32 * a + 24
    b.name = "four-node"
    b.params = {"alpha": alpha}
    b.predictions["ratio"] = Prediction(num / den, "(3a^3+24a^2+40a+24)/(a^3+10a^2+32a+24)")
    b.predictions["bound"] = Prediction(Fraction(3), "3")
    return b


def rd_one_norm_family(d: int, alpha) -> InstanceBundle:
    """``2d + 1`` points under the 1-norm.

    Node 0 is the origin, node 1 is ``e_1``, node 2 is ``-(2/alpha) e_1`` and the
    rest are ``+-(2/alpha) e_i`` for ``i = 2..d``.  OPT is the star owned by node 0;
    the NE is the star owned by node 1.
    """
    if d < 1:
        raise ConstraintError("rd_one_norm_family needs d >= 1")
    alpha = _positive(alpha)
    r = 2 / alpha

    def axis(i, x):
        v = [Fraction(0)] * d
        v[i] = Fraction(x)
        return tuple(v)

    pts = [axis(0, 0), axis(0, 1), axis(0, -r)]
    for i in range(1, d):
        pts += [axis(i, r), axis(i, -r)]
    n = len(pts)
    host = from_points(pts, p=1)
    opt = StrategyProfile.from_owned(n, [(0, i) for i in range(1, n)])
    ne = StrategyProfile.from_owned(n, [(1, i) for i in range(n) if i != 1])
    k = 2 * d - 1
    c_opt = (2 * n + alpha - 2) * (k * r + 1)
    c_ne = (2 * n + alpha - 2) * (k * (1 + r) + 1)
    preds = {
        "cost_OPT": Prediction(c_opt, "(2n+a-2)((2d-1)(2/a)+1)"),
        "cost_NE": Prediction(c_ne, "(2n+a-2)((2d-1)(1+2/a)+1)"),
        "ratio": Prediction(1 + alpha / (2 + alpha / k), "1+a/(2+a/(2d-1))"),
    }
    return InstanceBundle("rd-one-norm", {"d": d, "alpha": alpha}, host, {"OPT": opt, "NE": ne}, preds)


def one_two_lb_family(N: int, alpha) -> InstanceBundle:
    """Clique of ``N`` nodes, a star of ``N`` leaves on each clique node, and a hub.

    Node 0 is the hub, nodes ``1..N`` the clique, then the leaves of each star.
    For ``alpha = 1`` the hub is 1-connected to every node; for ``alpha < 1`` the
    hub-leaf pairs are 2-edges.  The NE network is every 1-edge except hub-leaf ones.
    """
    if N < 2:
        raise ConstraintError("one_two_lb_family needs N >= 2")
    alpha = Fraction(alpha)
    if not Fraction(1, 2) <= alpha <= 1:
        raise ConstraintError("one_two_lb_family needs 1/2 <= alpha <= 1")
    n = N * N + N + 1
    clique = list(range(1, N + 1))
    leaves = {v: [N + 1 + (v - 1) * N + j for j in range(N)] for v in clique}
    w = [[2] * n for _ in range(n)]
    for i in range(n):
        w[i][i] = 0
    ne_owned = []

    def one(a, b):
        w[a][b] = w[b][a] = 1

    for a, b in itertools.combinations(clique, 2):
        one(a, b)
        ne_owned.append((a, b))
    for v in clique:
        one(0, v)
        ne_owned.append((0, v))
        for x in leaves[v]:
            one(v, x)
            ne_owned.append((v, x))
            if alpha == 1:
                one(0, x)
    host = build_one_two(w)
    ne = StrategyProfile.from_owned(n, ne_owned)
    ones = [(a, b) for a, b in host.pairs() if host.w(a, b) == 1]
    opt = optimum_one_two(host, alpha)
    opt_profile = StrategyProfile.from_owned(n, opt.edges)
    full = StrategyProfile.from_owned(n, list(host.pairs()))
    total_w = sum(host.w(a, b) for a, b in host.pairs())
    c_ne = 3 * N**4 + 3 * N**3 + N**2 + N + alpha * (3 * N * N + N) / 2
    preds = {
        "cost_NE": Prediction(c_ne, "3N^4+3N^3+N^2+N + a(3N^2+N)/2"),
        "cost_OPT": Prediction(opt.social_cost, "optimum_one_two"),
        "ratio": Prediction(c_ne / opt.social_cost, "cost_NE/cost_OPT"),
        "cost_full_host": Prediction((alpha + 2) * total_w, "(a+2)*w(H)"),
        "ratio_vs_full_host": Prediction(c_ne / ((alpha + 2) * total_w), "cost_NE/cost_full_host"),
        "bound": Prediction(Fraction(3, 2) if alpha == 1 else 3 / (alpha + 2), "3/2 if a=1 else 3/(a+2)"),
    }
    if alpha == 1:
        c_ones = 2 * N**4 + 4 * N**3 - N**2 + N + Fraction(5 * N * N + N, 2)
        preds["cost_one_edges"] = Prediction(c_ones, "2N^4+4N^3-N^2+N + (5N^2+N)/2")
    profiles = {"NE": ne, "OPT": opt_profile, "FULL": full, "ONES": StrategyProfile.from_owned(n, ones)}
    return InstanceBundle("one-two-lb", {"N": N, "alpha": alpha}, host, profiles, preds, extra={"hub": 0, "clique": clique, "leaves": leaves})


def general_triangle(alpha) -> InstanceBundle:
    """Triangle ``a, b, c`` with ``w(a,b) = 0``, ``w(b,c) = 1``, ``w(a,c) = (alpha+2)/2``."""
    alpha = _positive(alpha)
    heavy = (alpha + 2) / 2
    host = build_general([[0, 0, heavy], [0, 0, 1], [heavy, 1, 0]], classify=True)
    opt = StrategyProfile.from_owned(3, [(0, 1), (1, 2)])
    ne = StrategyProfile.from_owned(3, [(0, 1), (0, 2)])
    preds = {
        "cost_OPT": Prediction(alpha + 4, "a+4"),
        "cost_NE": Prediction((alpha + 2) * (alpha + 4) / 2, "(a+2)(a+4)/2"),
        "ratio": Prediction(heavy, "(a+2)/2"),
        "sigma_heavy": Prediction(heavy**2, "((a+2)/2)^2"),
    }
    return InstanceBundle("general-triangle", {"alpha": alpha}, host, {"OPT": opt, "NE": ne}, preds, extra={"heavy_pair": (0, 2)})


# -- reductions ---------------------------------------------------------------


def _set_system(universe: Iterable[Hashable], sets: Sequence[Iterable[Hashable]]):
    uni = list(dict.fromkeys(universe))
    sets = [frozenset(s) for s in sets]
    if not uni:
        raise ConstraintError("empty universe")
    if not sets:
        raise ConstraintError("no sets given")
    for i, s in enumerate(sets):
        if not s:
            raise ConstraintError(f"set {i} is empty")
        if not s <= set(uni):
            raise ConstraintError(f"set {i} has elements outside the universe")
    if frozenset().union(*sets) != set(uni):
        raise ConstraintError("sets do not cover the universe")
    return uni, sets


def min_set_covers(universe, sets) -> list[tuple[int, ...]]:
    """All minimum-size covers as index tuples (brute force)."""
    uni, sets = _set_system(universe, sets)
    target = set(uni)
    for size in range(1, len(sets) + 1):
        found = [c for c in itertools.combinations(range(len(sets)), size) if set().union(*(sets[i] for i in c)) == target]
        if found:
            return found
    return []


def _check_reduction_params(k: int, L, eps, beta):
    L, eps, beta = Fraction(L), Fraction(eps), Fraction(beta)
    if eps <= 0 or L <= 0:
        raise ConstraintError("L and eps must be positive")
    if not beta > k * eps:
        raise ConstraintError(f"need beta > k*eps = {k * eps}")
    if not beta < L / 3:
        raise ConstraintError("need beta < L/3")
    return L, eps, beta


def set_cover_tree_instance(universe, sets, L=100, eps=Fraction(1, 100), beta=1) -> InstanceBundle:
    """Tree-metric instance whose designated agent ``u = 0`` best-responds with a minimum set cover.

    Nodes: ``u = 0``, ``c = 1``, set nodes ``a_i = 2 + i``, helpers ``b_i = 2 + m + i``,
    then element nodes ``p_j``.  Each element hangs off the first set containing it.
    """
    uni, sets = _set_system(universe, sets)
    m, k = len(sets), len(uni)
    L, eps, beta = _check_reduction_params(k, L, eps, beta)
    a = [2 + i for i in range(m)]
    b = [2 + m + i for i in range(m)]
    p = {x: 2 + 2 * m + j for j, x in enumerate(uni)}
    n = 2 + 2 * m + k
    tree = [(0, 1, L - eps)]
    for i in range(m):
        tree += [(b[i], 0, (L - beta) / 2), (1, a[i], eps)]
    for x in uni:
        first = next(i for i, s in enumerate(sets) if x in s)
        tree.append((a[first], p[x], L))
    host = from_tree(n, tree)
    owned = [(1, 0)]
    for i, s in enumerate(sets):
        owned += [(b[i], 0), (b[i], a[i])]
        owned += [(a[i], p[x]) for x in s]
    covers = min_set_covers(uni, sets)
    preds = {"min_cover_size": Prediction(Fraction(len(covers[0])), "brute-force minimum set cover")}
    extra = {"a_nodes": a, "b_nodes": b, "p_nodes": p, "min_covers": covers}
    params = {"universe": uni, "sets": [sorted(s) for s in sets], "L": L, "eps": eps, "beta": beta, "alpha": Fraction(1)}
    return InstanceBundle("set-cover-tree", params, host, {"G": StrategyProfile.from_owned(n, owned)}, preds, agent=0, extra=extra)


def _arc_point(radius: Fraction, t: Fraction, p: int) -> tuple[Fraction, Fraction]:
    """Rational point at norm ``radius`` near the positive x-axis, parameterized by ``t >= 0``."""
    if p == 1:
        return (radius - t, t)
    s = 1 + t * t
    return (radius * (1 - t * t) / s, radius * 2 * t / s)


def set_cover_points_instance(universe, sets, L=100, eps=Fraction(1, 100), beta=1, p=2) -> InstanceBundle:
    """Planar point instance (1- or 2-norm) whose agent ``u = 0`` best-responds with a minimum set cover.

    Nodes: ``u = 0`` at the origin, ``a_i = 1 + i`` on an arc of length at most
    ``eps`` at radius ``L``, ``b_i = 1 + m + i`` at radius ``(L - beta)/2`` on the
    ray opposite ``a_i``, then ``p_j`` on an arc at radius ``2L``.
    """
    if p not in (1, 2):
        raise ConstraintError("set_cover_points_instance supports p in {1, 2}")
    uni, sets = _set_system(universe, sets)
    m, k = len(sets), len(uni)
    L, eps, beta = _check_reduction_params(k, L, eps, beta)
    # parameter ranges that keep each arc within length eps
    span_a = eps / 2 if p == 1 else eps / (2 * L)
    span_p = eps / 2 if p == 1 else eps / (4 * L)

    def spread(span, count):
        return [span * i / (count - 1) if count > 1 else Fraction(0) for i in range(count)]

    a_pts = [_arc_point(L, t, p) for t in spread(span_a, m)]
    p_pts = [_arc_point(2 * L, t, p) for t in spread(span_p, k)]
    shrink = (L - beta) / (2 * L)
    b_pts = [(-shrink * x, -shrink * y) for x, y in a_pts]
    coords = [(Fraction(0), Fraction(0))] + a_pts + b_pts + p_pts
    host = from_points(coords, p=p)
    a = [1 + i for i in range(m)]
    b = [1 + m + i for i in range(m)]
    pn = {x: 1 + 2 * m + j for j, x in enumerate(uni)}
    n = 1 + 2 * m + k
    tol = 0 if host.exact else host.eps * max(1, float(L))

    def near(x, y):
        return abs(x - y) <= tol

    for i in range(m):
        assert near(host.w(0, a[i]), L)
        assert near(host.w(0, b[i]), (L - beta) / 2)
        assert near(host.w(b[i], a[i]), (L - beta) / 2 + L)
    for j in pn.values():
        assert near(host.w(0, j), 2 * L)
    assert all(host.w(x, y) <= eps + tol for x, y in itertools.combinations(a, 2))
    assert all(host.w(x, y) <= eps + tol for x, y in itertools.combinations(pn.values(), 2))
    owned = []
    for i, s in enumerate(sets):
        owned += [(b[i], 0), (b[i], a[i])]
        owned += [(a[i], pn[x]) for x in s]
    covers = min_set_covers(uni, sets)
    preds = {"min_cover_size": Prediction(Fraction(len(covers[0])), "brute-force minimum set cover")}
    extra = {"a_nodes": a, "b_nodes": b, "p_nodes": pn, "min_covers": covers}
    params = {"universe": uni, "sets": [sorted(s) for s in sets], "L": L, "eps": eps, "beta": beta, "p": p, "alpha": Fraction(1)}
    return InstanceBundle("set-cover-points", params, host, {"G": StrategyProfile.from_owned(n, owned)}, preds, agent=0, extra=extra)


def _graph(edges):
    edges = [tuple(e) for e in edges]
    for e in edges:
        if len(e) != 2 or e[0] == e[1]:
            raise ConstraintError(f"bad graph edge {e!r}")
    vertices = sorted({x for e in edges for x in e})
    return vertices, edges


def is_vertex_cover(edges, cover) -> bool:
    cover = set(cover)
    return all(u in cover or v in cover for u, v in edges)


def min_vertex_cover_size(edges) -> int:
    vertices, edges = _graph(edges)
    for size in range(len(vertices) + 1):
        if any(is_vertex_cover(edges, c) for c in itertools.combinations(vertices, size)):
            return size
    return len(vertices)


def vertex_cover_instance(edges, cover) -> InstanceBundle:
    """One-two instance where ``u = 0`` buying the cover's vertex nodes is a NE iff the cover is minimum.

    Nodes: ``u = 0``, one vertex node per graph vertex (sorted), then two edge
    nodes per graph edge.  Vertex-vertex 1-edges are owned by the smaller
    index, vertex-edge 1-edges by the vertex node.
    """
    vertices, edges = _graph(edges)
    if not edges:
        raise ConstraintError("graph has no edges")
    cover = list(dict.fromkeys(cover))
    if not set(cover) <= set(vertices) or not is_vertex_cover(edges, cover):
        raise ConstraintError("cover is not a vertex cover of the graph")
    a = {x: 1 + i for i, x in enumerate(vertices)}
    pe = [(1 + len(vertices) + 2 * j, 2 + len(vertices) + 2 * j) for j in range(len(edges))]
    n = 1 + len(vertices) + 2 * len(edges)
    w = [[2] * n for _ in range(n)]
    for i in range(n):
        w[i][i] = 0
    owned = []
    for x, y in itertools.combinations(vertices, 2):
        w[a[x]][a[y]] = w[a[y]][a[x]] = 1
        owned.append((a[x], a[y]))
    for (x, y), nodes in zip(edges, pe):
        for v in (x, y):
            for q in nodes:
                w[a[v]][q] = w[q][a[v]] = 1
                owned.append((a[v], q))
    owned += [(0, a[x]) for x in cover]
    host = build_one_two(w)
    minimum = min_vertex_cover_size(edges)
    preds = {
        "min_cover_size": Prediction(Fraction(minimum), "brute-force minimum vertex cover"),
        "is_ne": Prediction(Fraction(int(len(cover) == minimum)), "1 iff |cover| is minimum"),
    }
    extra = {"vertex_nodes": a, "edge_nodes": pe, "cover": cover}
    params = {"edges": [list(e) for e in edges], "cover": cover, "alpha": Fraction(1)}
    return InstanceBundle("vertex-cover", params, host, {"G": StrategyProfile.from_owned(n, owned)}, preds, agent=0, extra=extra)


def brc_points() -> HostGraph:
    """Ten planar points under the 1-norm used for best-response cycle search."""
    return from_points(BRC_POINTS, p=1)
