from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import ALPHAS, as_host, host_and_profile
from gncg.errors import InvalidProfileError
from gncg.families import tree_star_family
from gncg.game import (
    AgentView,
    StrategyProfile,
    agent_cost,
    agent_costs,
    all_single_owner_profiles,
    distances,
    edge_set_cost,
    induced_network,
    network_from_edges,
    pair_sigma,
    social_cost,
    stretch,
)
from gncg.hostgraph import build_general, build_one_two, from_tree, random_metric


def two_nodes(w=3):
    return build_general([[0, w], [w, 0]])


class TestProfile:
    def test_helpers(self):
        s = StrategyProfile.from_owned(3, [(0, 1), (2, 1), (1, 0)])
        assert s.to_lists() == [[1], [0], [1]]
        assert s.edges() == {(0, 1), (1, 2)}
        assert s.double_owned() == [(0, 1)]
        assert s.key() == ((1,), (0,), (1,))
        assert s.with_strategy(1, []).double_owned() == []

    def test_validate(self):
        with pytest.raises(InvalidProfileError):
            StrategyProfile.from_lists([[0], []]).validate(2)
        with pytest.raises(InvalidProfileError):
            StrategyProfile.from_lists([[5], []]).validate(2)
        with pytest.raises(InvalidProfileError):
            StrategyProfile.from_lists([[1]]).validate(2)

    def test_single_owner_enumeration(self):
        profiles = list(all_single_owner_profiles(3))
        assert len(profiles) == 27
        assert all(not p.double_owned() for p in profiles)


class TestInducedNetwork:
    def test_single_edge(self):
        g = induced_network(two_nodes(), StrategyProfile.from_lists([[1], []]))
        assert g.edges == [(0, 1)] and g.owners[(0, 1)] == {0} and g.double_owned == []

    def test_double_owner_flag(self):
        g = induced_network(two_nodes(), StrategyProfile.from_lists([[1], [0]]))
        assert g.edges == [(0, 1)] and g.double_owned == [(0, 1)]

    def test_empty(self):
        h = build_general([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
        g = induced_network(h, StrategyProfile.empty(3))
        d = distances(g)
        assert g.edges == [] and all(d[u, v] == math.inf for u in range(3) for v in range(3) if u != v)
        assert not g.is_connected

    def test_self_target_rejected(self):
        with pytest.raises(InvalidProfileError):
            induced_network(two_nodes(), StrategyProfile.from_lists([[0], []]))


class TestDistances:
    def test_star_leaf_pairs(self):
        h = build_general([[0, 1, 2, 3], [1, 0, 3, 4], [2, 3, 0, 5], [3, 4, 5, 0]])
        d = distances(network_from_edges(h, [(0, 1), (0, 2), (0, 3)]))
        assert d[1, 2] == 3 and d[1, 3] == 4 and d[2, 3] == 5

    def test_tree_star_ne_distance_total(self):
        b = tree_star_family(5, 2)
        d = distances(induced_network(b.host, b.profiles["NE"]))
        assert sum(d.flat) == 56

    def test_disconnected(self):
        assert distances(network_from_edges(two_nodes(), []))[0, 1] == math.inf

    @settings(max_examples=40, deadline=None)
    @given(host_and_profile(n_max=5))
    def test_matches_oracle(self, hp):
        w, s = hp
        d = distances(induced_network(as_host(w), s))
        ref = oracles.apsp(len(w), oracles.edges_of(s.strategies), w)
        assert all(d[u, v] == ref[u][v] for u in range(len(w)) for v in range(len(w)))


class TestAgentCost:
    def test_two_nodes(self):
        s = StrategyProfile.from_lists([[1], []])
        assert agent_cost(two_nodes(), s, 0, 2).total == 9
        assert agent_cost(two_nodes(), s, 1, 2).total == 3

    def test_tree_star_center(self):
        b = tree_star_family(5, 2)
        c = agent_cost(b.host, b.profiles["NE"], 1, 2)
        assert (c.edge_cost, c.distance_cost, c.total) == (14, 7, 21)

    def test_empty_strategy_connected(self):
        s = StrategyProfile.from_lists([[1], []])
        assert agent_cost(two_nodes(), s, 1, 5).edge_cost == 0

    def test_disconnected_is_infinite(self):
        c = agent_cost(two_nodes(), StrategyProfile.empty(2), 0, 1)
        assert c.total == math.inf and c.edge_cost == 0

    @settings(max_examples=40, deadline=None)
    @given(host_and_profile(n_max=4), ALPHAS)
    def test_matches_oracle(self, hp, alpha):
        w, s = hp
        h = as_host(w)
        costs = agent_costs(h, s, alpha)
        for u in range(len(w)):
            ref = oracles.agent_cost(w, s.strategies, u, alpha)
            assert costs[u].total == ref
            assert costs[u].total == costs[u].edge_cost + costs[u].distance_cost


class TestSocialCost:
    def test_tree_star(self):
        b = tree_star_family(5, 2)
        assert social_cost(b.host, b.profiles["OPT"], 2) == 40
        assert social_cost(b.host, b.profiles["NE"], 2) == 70

    def test_edgeless_infinite(self):
        assert social_cost(two_nodes(), StrategyProfile.empty(2), 1) == math.inf

    def test_double_owned_edge_paid_twice(self):
        assert social_cost(two_nodes(), StrategyProfile.from_lists([[1], [0]]), 1) == 3 + 3 + 6
        assert edge_set_cost(two_nodes(), [(0, 1)], 1) == 9

    @settings(max_examples=40, deadline=None)
    @given(host_and_profile(n_max=4), ALPHAS)
    def test_sum_of_agents(self, hp, alpha):
        w, s = hp
        h = as_host(w)
        assert social_cost(h, s, alpha) == sum(c.total for c in agent_costs(h, s, alpha))
        assert social_cost(h, s, alpha) == oracles.social_cost(w, s.strategies, alpha)

    @settings(max_examples=30, deadline=None)
    @given(host_and_profile(n_max=4), ALPHAS, st.fractions(min_value=Fraction(1, 5), max_value=5))
    def test_homogeneity(self, hp, alpha, c):
        w, s = hp
        h = as_host(w)
        assert social_cost(h.scaled(c), s, alpha) == c * social_cost(h, s, alpha)

    @settings(max_examples=30, deadline=None)
    @given(host_and_profile(n_max=4, low=1), ALPHAS)
    def test_dropping_duplicate_ownership(self, hp, alpha):
        w, s = hp
        dup = s.double_owned()
        if not dup:
            return
        u, v = dup[0]
        h = as_host(w)
        fixed = s.with_strategy(u, s[u] - {v})
        before = distances(induced_network(h, s))
        after = distances(induced_network(h, fixed))
        assert (after == before).all()
        assert agent_cost(h, fixed, u, alpha).total < agent_cost(h, s, u, alpha).total


class TestStretch:
    def test_complete_network(self, rng):
        h = random_metric(5, rng)
        assert stretch(h, network_from_edges(h, h.pairs())) == 1

    def test_one_two_k3(self):
        h = build_one_two([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
        assert stretch(h, network_from_edges(h, [(0, 1), (1, 2)])) == 1

    def test_tree_star_ne(self):
        alpha = 2
        b = tree_star_family(5, alpha)
        k = stretch(b.host, induced_network(b.host, b.profiles["NE"]))
        # d_G(u, leaf) = 1 + 2 against d_H(u, leaf) = 1
        assert k == 3
        assert k <= alpha + 1

    def test_disconnected_and_zero_pairs(self):
        h = build_general([[0, 0, 1], [0, 0, 1], [1, 1, 0]])
        assert stretch(h, network_from_edges(h, [(0, 1)])) == math.inf
        assert stretch(h, network_from_edges(h, [(0, 2), (1, 2)])) == math.inf
        assert stretch(h, network_from_edges(h, [(0, 1), (1, 2)])) == 1

    @settings(max_examples=30, deadline=None)
    @given(host_and_profile(n_max=5, low=1))
    def test_at_least_one_when_connected(self, hp):
        w, s = hp
        h = as_host(w)
        g = induced_network(h, s)
        if g.is_connected:
            assert stretch(h, g) >= 1


def test_pair_sigma_triangle():
    h = build_general([[0, 0, 2], [0, 0, 1], [2, 1, 0]])
    ne = network_from_edges(h, [(0, 1), (0, 2)])
    opt = network_from_edges(h, [(0, 1), (1, 2)])
    assert pair_sigma(h, ne, opt, 0, 2, 2) == 4


def test_agent_view_matches_agent_cost(rng):
    from gncg._kernel import Kernel

    h = from_tree(5, [(0, 1, 1), (1, 2, 2), (1, 3, 1), (3, 4, 3)])
    s = StrategyProfile.from_owned(5, [(1, 0), (2, 1), (3, 1), (4, 3), (0, 4)])
    k = Kernel(h, Fraction(3, 2))
    for u in range(5):
        view = AgentView(k, s, u)
        assert k.value(view.current_cost()) == agent_cost(h, s, u, Fraction(3, 2)).total
