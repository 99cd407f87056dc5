"""Baseline policies: tree shapes, feasibility, ASAP Monte Carlo, UB."""

import numpy as np
import pytest

from swapsched.baselines import (
    asap_monte_carlo,
    linear_plan,
    linear_tree,
    nesting_plan,
    nesting_tree,
    upper_bound,
)
from swapsched.fidelity import FidelityModel
from swapsched.instance import Batch, Instance, Path, Request, substream
from swapsched.strategy import (
    evaluate_fidelity,
    numerology_to_tree,
    tree_debug_str,
    tree_to_numerology,
)
from swapsched.topology import EdgeInfo, NodeInfo, Topology

from tests.test_fnpr import single_edge_instance, tiny_random_instance


def chain_instance(hops, num_slots, fid=0.95, link_prob=1.0, swap_prob=1.0, caps=2, threshold=0.5):
    n = hops + 1
    nodes = [NodeInfo(i, float(i), 0.0, swap_prob) for i in range(n)]
    edges = [EdgeInfo(i, i + 1, 0.0, fid, link_prob) for i in range(hops)]
    capacity = np.full((num_slots + 1, n), caps, dtype=np.int64)
    capacity[0] = 0
    topo = Topology(nodes, edges, capacity)
    prob = link_prob**hops * swap_prob ** max(hops - 1, 0)
    req = Request(0, 0, n - 1, (Path(tuple(range(n)), prob),))
    return Instance(topo, Batch(num_slots, 2.0, 2.0), [req], FidelityModel(), threshold)


class TestTreeShapes:
    def test_nesting_four_hops_complete(self):
        tree = nesting_tree(4)
        assert tree.avail_slot == 4
        assert tree_debug_str(tree) == (
            "1-5@4\n  1-3@3\n    1-2@2\n    2-3@2\n  3-5@3\n    3-4@2\n    4-5@2"
        )

    def test_nesting_three_hops_carries_segment(self):
        tree = nesting_tree(3)
        assert tree.avail_slot == 4
        assert tree_debug_str(tree) == "1-4@4\n  1-3@3\n    1-2@2\n    2-3@2\n  3-4@2"

    def test_single_edge_same_shape(self):
        assert nesting_tree(1) == linear_tree(1) == __import__("swapsched.strategy", fromlist=["TreeNode"]).TreeNode(1, 2, 2)

    def test_linear_four_hops_skewed(self):
        tree = linear_tree(4)
        assert tree.avail_slot == 5
        assert tree_debug_str(tree) == (
            "1-5@5\n  1-4@4\n    1-3@3\n      1-2@2\n      2-3@2\n    3-4@2\n  4-5@2"
        )

    def test_shapes_round_trip(self):
        for hops in (1, 2, 3, 4, 5, 6):
            for tree in (nesting_tree(hops), linear_tree(hops)):
                assert numerology_to_tree(tree_to_numerology(tree)) == tree


class TestPlans:
    def test_single_edge_plans(self):
        inst = single_edge_instance()
        for plan in (nesting_plan, linear_plan):
            out = plan(inst)
            assert out.accepted_count == 1
            assert out.entries[0].fidelity == 0.9

    def test_linear_rejected_when_horizon_short(self):
        # 4 hops need root slot 5 under the linear shape
        inst = chain_instance(4, num_slots=4)
        assert linear_plan(inst).accepted_count == 0
        assert nesting_plan(inst).accepted_count == 1

    def test_plans_feasible_on_random_instances(self):
        for seed in range(6):
            inst = tiny_random_instance(seed)
            for plan in (nesting_plan, linear_plan):
                out = plan(inst)
                assert out.is_feasible(inst, check_threshold=True)

    def test_complete_beats_all_leaves_skewed_on_uniform(self):
        model = FidelityModel()
        hom = [0.98] * 4
        complete = nesting_tree(4)
        skewed = linear_tree(4)
        assert evaluate_fidelity(complete, hom, model) > evaluate_fidelity(skewed, hom, model)


class TestAsap:
    def test_certain_probabilities_match_nesting(self):
        inst = chain_instance(4, num_slots=6)
        out = asap_monte_carlo(inst, 5, substream(0, "monte_carlo"))
        assert out.acceptance_rate == 1.0
        nest = nesting_plan(inst)
        assert out.mean_fidelity_sum == pytest.approx(nest.entries[0].fidelity, abs=1e-12)
        assert out.stderr_fidelity_sum == 0.0

    def test_dead_link_never_accepts(self):
        inst = chain_instance(2, num_slots=5, link_prob=1.0)
        inst.topology.edges[(0, 1)] = EdgeInfo(0, 1, 0.0, 0.95, 0.0)
        out = asap_monte_carlo(inst, 50, substream(1, "monte_carlo"))
        assert out.acceptance_rate == 0.0
        assert out.mean_fidelity_sum == 0.0

    def test_determinism(self):
        inst = tiny_random_instance(3)
        a = asap_monte_carlo(inst, 40, substream(7, "monte_carlo"))
        b = asap_monte_carlo(inst, 40, substream(7, "monte_carlo"))
        assert a == b

    def test_keep_mode_runs(self):
        inst = tiny_random_instance(4)
        out = asap_monte_carlo(inst, 20, substream(2, "monte_carlo"), swap_failure="keep")
        assert 0.0 <= out.acceptance_rate <= 1.0


class TestUpperBound:
    def test_empty(self):
        inst = single_edge_instance()
        inst.requests = []
        assert upper_bound(inst) == 0.0

    def test_single_request_bound(self):
        inst = single_edge_instance(prob=0.8)
        ub = upper_bound(inst, epsilon=0.1)
        assert ub >= (1 - 0.2) * 0.8 - 1e-9

    def test_dominates_integral_plans(self):
        from swapsched.flto import flto_solve
        from swapsched.fnpr import fnpr_solve

        for seed in range(5):
            inst = tiny_random_instance(seed)
            ub = upper_bound(inst, epsilon=0.1)
            for alloc in (
                flto_solve(inst),
                fnpr_solve(inst, mode="tetris_n", epsilon=0.1, seed=seed),
                nesting_plan(inst),
                linear_plan(inst),
            ):
                assert ub >= alloc.fidelity_free_objective - 1e-6
