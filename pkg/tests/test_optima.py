from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import ALPHAS, as_host, weight_matrices
from gncg.equilibria import certify
from gncg.errors import CapExceededError, ConstraintError
from gncg.families import tree_star_family
from gncg.game import network_from_edges, stretch
from gncg.hostgraph import build_general, build_one_two, from_tree, random_metric, random_one_two, random_tree
from gncg.optima import (
    make_edge_set,
    min_weight_spanner,
    optimum_exact,
    optimum_one_two,
    optimum_tree,
    spanner_ne_ownership,
)


def k3(a, b, c):
    return build_one_two([[0, a, c], [a, 0, b], [c, b, 0]])


def brute_spanner_weight(host, k):
    w = [list(r) for r in host.weights]
    n = host.n
    pairs = list(host.pairs())
    dh = oracles.host_paths(w)
    best = math.inf
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        d = oracles.apsp(n, edges, w)
        if all(d[u][v] != math.inf and d[u][v] <= k * dh[u][v] for u, v in pairs):
            best = min(best, sum((w[u][v] for u, v in edges), Fraction(0)))
    return best


class TestOptimumExact:
    def test_k3_small_alpha(self):
        es, cost = optimum_exact(k3(1, 1, 2), Fraction(2, 5))
        assert es.edges == ((0, 1), (1, 2)) and cost == Fraction(44, 5) == es.social_cost
        assert es.total_weight == 2

    def test_tree_host_gives_tree(self, rng):
        for n in (4, 5, 6):
            h = random_tree(n, rng)
            es, _ = optimum_exact(h, Fraction(1, 2))
            assert set(es.edges) == {(min(u, v), max(u, v)) for u, v, _ in h.tree_edges}

    def test_zero_one_two_triangle(self):
        h = build_general([[0, 0, 2], [0, 0, 1], [2, 1, 0]])
        es, cost = optimum_exact(h, 2)
        assert es.edges == ((0, 1), (1, 2)) and cost == 6

    def test_cap(self):
        with pytest.raises(CapExceededError):
            optimum_exact(random_metric(8, np.random.default_rng(0)), 1)

    def test_disconnectable_host_still_connected(self):
        h = build_general([[0, 1, "inf"], [1, 0, 1], ["inf", 1, 0]])
        es, cost = optimum_exact(h, 1)
        assert es.edges == ((0, 1), (1, 2)) and cost == 2 + 8

    @settings(max_examples=25, deadline=None)
    @given(weight_matrices(n_min=2, n_max=4), ALPHAS)
    def test_matches_oracle(self, w, alpha):
        es, cost = optimum_exact(as_host(w), alpha)
        assert cost == oracles.optimum(w, alpha)
        assert cost == oracles.edge_set_cost(w, es.edges, alpha)

    @settings(max_examples=25, deadline=None)
    @given(weight_matrices(n_min=2, n_max=5, low=1), st.sampled_from([1, 2, 4]))
    def test_optimum_is_spanner(self, w, alpha):
        h = as_host(w)
        es, _ = optimum_exact(h, alpha)
        assert stretch(h, es.network(h)) <= Fraction(alpha, 2) + 1


class TestOptimumOneTwo:
    def test_k3(self):
        assert optimum_one_two(k3(1, 1, 2), 1).edges == ((0, 1), (1, 2))
        assert optimum_one_two(k3(2, 2, 2), 1).edges == ((0, 1), (0, 2), (1, 2))

    def test_preconditions(self):
        with pytest.raises(ConstraintError):
            optimum_one_two(k3(1, 1, 2), 2)
        with pytest.raises(ConstraintError):
            optimum_one_two(random_metric(3, np.random.default_rng(0)), 1)

    def test_matches_exact(self, rng):
        for _ in range(8):
            h = random_one_two(5, rng)
            for alpha in (Fraction(1, 4), Fraction(3, 4), 1):
                es = optimum_one_two(h, alpha)
                assert es.social_cost == optimum_exact(h, alpha)[1]
                ones = {(u, v) for u, v in h.pairs() if h.w(u, v) == 1}
                assert ones <= set(es.edges)
                d = es.network(h).dist
                assert max(d.flat) <= 2


class TestOptimumTree:
    def test_star(self):
        b = tree_star_family(5, 2)
        assert optimum_tree(b.host).edges == ((0, 1), (0, 2), (0, 3), (0, 4))

    def test_path(self):
        assert optimum_tree(from_tree(3, [(0, 1, 1), (1, 2, 1)])).edges == ((0, 1), (1, 2))

    def test_matches_exact(self, rng):
        for n in (3, 5, 6):
            h = random_tree(n, rng)
            assert optimum_tree(h, 2).social_cost == optimum_exact(h, 2)[1]

    def test_wrong_kind(self):
        with pytest.raises(ConstraintError):
            optimum_tree(k3(1, 1, 2))


class TestSpanner:
    def test_k3_three_halves(self):
        assert min_weight_spanner(k3(1, 1, 2), Fraction(3, 2)).edges == ((0, 1), (1, 2))

    def test_infinite_stretch_is_mst(self, rng):
        h = random_metric(5, rng)
        es = min_weight_spanner(h, math.inf)
        assert len(es.edges) == 4 and es.network(h).is_connected
        assert es.total_weight == brute_spanner_weight(h, math.inf)

    def test_stretch_one(self, rng):
        for _ in range(3):
            h = random_metric(5, rng, high=6)
            es = min_weight_spanner(h, 1)
            assert stretch(h, es.network(h)) == 1
            assert es.total_weight == brute_spanner_weight(h, 1)

    def test_one_two_three_halves_properties(self, rng):
        for _ in range(5):
            h = random_one_two(5, rng)
            es = min_weight_spanner(h, Fraction(3, 2))
            ones = {(u, v) for u, v in h.pairs() if h.w(u, v) == 1}
            assert ones <= set(es.edges)
            assert max(es.network(h).dist.flat) <= 3
            assert es.total_weight == brute_spanner_weight(h, Fraction(3, 2))

    def test_float_stretch(self, rng):
        h = random_metric(4, rng)
        assert min_weight_spanner(h, 1.5).total_weight == min_weight_spanner(h, Fraction(3, 2)).total_weight


class TestSpannerOwnership:
    def test_k3(self):
        h = k3(1, 1, 2)
        es = min_weight_spanner(h, Fraction(3, 2))
        prof = spanner_ne_ownership(h, es, Fraction(3, 4))
        assert prof is not None and certify(h, prof, Fraction(3, 4)).stable
        assert prof.edges() == set(es.edges) and not prof.double_owned()

    def test_random_n5(self, rng):
        h = random_one_two(5, rng)
        es = min_weight_spanner(h, Fraction(3, 2))
        prof = spanner_ne_ownership(h, es, 1)
        assert prof is not None and certify(h, prof, 1).stable

    def test_alpha_out_of_range(self):
        h = k3(1, 1, 2)
        es = min_weight_spanner(h, Fraction(3, 2))
        with pytest.raises(ConstraintError):
            spanner_ne_ownership(h, es, Fraction(1, 4))

    def test_orientation_cap(self):
        h = k3(1, 1, 2)
        es = min_weight_spanner(h, Fraction(3, 2))
        with pytest.raises(CapExceededError):
            spanner_ne_ownership(h, es, 1, cap=1)

    def test_none_logged(self, caplog):
        # a star on a K3 of 1-edges with alpha = 1/2 cannot be a NE: leaves buy the missing 1-edge
        h = k3(1, 1, 1)
        es = make_edge_set(h, [(0, 1), (1, 2)], Fraction(1, 2))
        assert spanner_ne_ownership(h, es, Fraction(1, 2)) is None
        assert "no NE orientation" in caplog.text


def test_edge_set_network_and_dict():
    h = k3(1, 1, 2)
    es = make_edge_set(h, [(1, 0), (2, 1)], 1)
    assert es.edges == ((0, 1), (1, 2))
    assert es.to_dict()["social_cost"] == es.social_cost == 2 + 8
    assert network_from_edges(h, es.edges).edges == list(es.edges)
