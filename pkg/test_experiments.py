"""Tests for the two-state curve, the oblivious baseline and routing."""

import numpy as np
import pytest

from sas_mdp.core import ExplicitAvailability, SamplerAvailability
from sas_mdp.core.instances import GO, S1, STAY
from sas_mdp.experiments import (
    build_road_graph,
    build_routing_problem,
    compare_policies,
    curve_point,
    oblivious_policy,
    possible_actions,
    routing_comparison,
    two_state_curve,
)
from sas_mdp.experiments.routing import CROSS, WAIT
from sas_mdp.experiments.two_state import DEFAULT_P_GRID
from sas_mdp.utils.errors import DisconnectedGraphError, UnsupportedModelError


class TestTwoStateCurve:
    def test_low_p_loses_value(self):
        point = curve_point(0.2)
        assert point.v_sas == pytest.approx(5.0, abs=1e-9)
        assert point.v_naive == pytest.approx(0.68 / 0.19, abs=1e-9)
        assert point.fraction_lost == pytest.approx(0.2842105, abs=1e-6)

    def test_crossover(self):
        point = curve_point(0.5)
        assert point.v_sas == pytest.approx(5.0, abs=1e-9)
        assert point.fraction_lost == pytest.approx(0.0, abs=1e-9)

    def test_always_available(self):
        point = curve_point(1.0)
        assert point.v_sas == pytest.approx(1.4 / 0.19, abs=1e-9)
        assert point.v_naive == pytest.approx(point.v_sas)
        assert point.fraction_lost == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("p", [0.0, -0.1, 1.5])
    def test_rejects_bad_probability(self, p):
        with pytest.raises(ValueError):
            curve_point(p)

    def test_curve_shape(self):
        points = two_state_curve()
        assert [pt.p for pt in points] == list(DEFAULT_P_GRID)
        assert len(points) == 20
        fractions = [pt.fraction_lost for pt in points]
        for before, after in zip(fractions, fractions[1:]):
            assert after <= before + 1e-9
        assert all(pt.fraction_lost == pytest.approx(0.0, abs=1e-9) for pt in points if pt.p >= 0.5)
        assert all(pt.v_naive <= pt.v_sas + 1e-9 for pt in points)


class TestObliviousBaseline:
    def test_two_state_goes_first(self, two_state):
        policy = oblivious_policy(two_state.mdp, two_state.availability)
        assert policy.as_lists()[S1] == [GO, STAY]

    def test_possible_actions_pda(self, two_state):
        assert possible_actions(two_state.availability).all()

    def test_possible_actions_explicit(self):
        avail = ExplicitAvailability(tables=(((1, 0.5), (5, 0.5)), ((2, 1.0),)), actions=3)
        np.testing.assert_array_equal(
            possible_actions(avail), [[True, False, True], [False, True, False]]
        )

    def test_possible_actions_through_sampler(self, two_state):
        sampler = SamplerAvailability.from_model(two_state.availability)
        assert possible_actions(sampler).all()

    def test_opaque_sampler(self):
        sampler = SamplerAvailability(states=1, actions=1, draw=lambda s, rng: 1)
        with pytest.raises(UnsupportedModelError):
            possible_actions(sampler)


class TestRoadGraph:
    def test_layout(self):
        graph = build_road_graph(3, bridge_prob=0.3, seed=4)
        assert graph.number_of_nodes() == 6
        assert graph.number_of_edges() == 12
        assert graph[0][3] == {"length": 1.0, "availability": 0.3, "action": CROSS}
        for u, v, data in graph.edges(data=True):
            assert 1.0 <= data["length"] < 1.5
            assert data["length"] == graph[v][u]["length"]

    def test_same_seed_same_lengths(self):
        first = build_road_graph(4, 0.5, seed=9)
        second = build_road_graph(4, 0.1, seed=9)
        for u, v, length in first.edges(data="length"):
            assert second[u][v]["length"] == length

    def test_without_bridge(self):
        graph = build_road_graph(3, 0.5, bridge=False)
        assert not graph.has_edge(0, 3)
        assert graph.number_of_edges() == 10

    def test_too_few_nodes(self):
        with pytest.raises(ValueError):
            build_road_graph(1, 0.5)


class TestRoutingProblem:
    def test_instance(self):
        problem = build_routing_problem(nodes=3, bridge_prob=0.4)
        mdp, avail = problem.instance.mdp, problem.instance.availability
        assert (problem.source, problem.destination) == (0, 3)
        assert mdp.n_states == 6
        assert mdp.discount == 0.999
        np.testing.assert_array_equal(avail.rho[:, WAIT], 1.0)
        assert avail.rho[0, CROSS] == 0.4
        np.testing.assert_array_equal(mdp.rewards[3], 0.0)
        np.testing.assert_array_equal(mdp.transitions[3, :, 3], 1.0)

    def test_disconnected(self):
        with pytest.raises(DisconnectedGraphError):
            build_routing_problem(nodes=3, bridge_prob=0.5, edge_avail=0.0)

    def test_reliable_bridge_has_no_gap(self):
        point = compare_policies(build_routing_problem(bridge_prob=1.0))
        assert point.p == 1.0
        assert point.sas_cost == pytest.approx(1.0, abs=1e-9)
        assert point.gap == pytest.approx(0.0, abs=1e-9)

    def test_unreliable_bridge_costs_the_oblivious_driver(self):
        point = compare_policies(build_routing_problem(bridge_prob=0.02))
        assert point.gap > 1.0

    @pytest.mark.slow
    def test_sas_never_worse(self):
        points = routing_comparison([0.02, 0.1, 0.4, 1.0])
        assert all(pt.sas_cost <= pt.oblivious_cost + 1e-9 for pt in points)

    @pytest.mark.slow
    def test_gap_shrinks_as_bridge_improves(self):
        points = routing_comparison([0.1, 0.2, 0.4, 0.8, 1.0])
        assert [pt.p for pt in points] == [0.1, 0.2, 0.4, 0.8, 1.0]
        assert all(pt.sas_cost <= pt.oblivious_cost + 1e-9 for pt in points)
        gaps = [pt.gap for pt in points]
        for before, after in zip(gaps, gaps[1:]):
            assert after <= before + 1e-9
        assert points[-1].sas_cost == pytest.approx(points[-1].oblivious_cost, abs=1e-9)

    def test_no_bridge_no_gap(self):
        points = routing_comparison([0.1, 0.5], bridge=False)
        assert len(points) == 1
        assert points[0].p == 0.0
        assert points[0].gap == pytest.approx(0.0, abs=1e-9)
