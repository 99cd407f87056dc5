"""Greedy REI allocation: scoring, collision handling, optimality bound."""

import numpy as np
import pytest

from swapsched.bruteforce import ilp_optimum
from swapsched.fidelity import FidelityModel
from swapsched.flto import flto_solve, rei
from swapsched.instance import Batch, Instance, Path, Request, mis_reduction
from swapsched.strategy import TreeNode, tree_to_numerology
from swapsched.topology import EdgeInfo, NodeInfo, Topology

from tests.test_fnpr import single_edge_instance, tiny_random_instance


class TestRei:
    def test_single_edge_example(self):
        # four occupied cells at residual 10 each: denominator 0.4
        m = tree_to_numerology(TreeNode(1, 2, 2))
        rows = [[0, 0, 0]] + [[0, 10, 10] for _ in range(3)]
        assert rei(0.9, 0.98, m, rows) == pytest.approx(0.9 * 0.98 / 0.4, abs=1e-12)

    def test_uniform_scaling_doubles_score(self):
        m = tree_to_numerology(TreeNode(1, 3, 3, 2, TreeNode(1, 2, 2), TreeNode(2, 3, 2)))
        rows = [[0] * 4] + [[0, 4, 4, 4] for _ in range(3)]
        doubled = [[0] * 4] + [[0, 8, 8, 8] for _ in range(3)]
        assert rei(0.8, 0.9, m, doubled) == pytest.approx(2 * rei(0.8, 0.9, m, rows), abs=1e-12)

    def test_zero_prob_zero_score(self):
        m = tree_to_numerology(TreeNode(1, 2, 2))
        rows = [[0, 0, 0]] + [[0, 5, 5] for _ in range(3)]
        assert rei(0.0, 0.9, m, rows) == 0.0


class TestFltoSolve:
    def test_single_request_allocated(self):
        inst = single_edge_instance()
        out = flto_solve(inst)
        assert out.accepted_count == 1
        assert out.entries[0].fidelity >= inst.threshold

    def test_collision_takes_higher_rei(self):
        # two single-edge requests share a capacity-1 cell; only one fits
        nodes = [NodeInfo(0, 0.0, 0.0, 1.0), NodeInfo(1, 1.0, 0.0, 1.0), NodeInfo(2, 2.0, 0.0, 1.0)]
        edges = [EdgeInfo(0, 1, 0.0, 0.95, 0.9), EdgeInfo(1, 2, 0.0, 0.9, 0.8)]
        capacity = np.zeros((3, 3), dtype=np.int64)
        capacity[1:, :] = [1, 1, 1]
        topo = Topology(nodes, edges, capacity)
        reqs = [
            Request(0, 0, 1, (Path((0, 1), 0.9),)),
            Request(1, 1, 2, (Path((1, 2), 0.8),)),
        ]
        inst = Instance(topo, Batch(2, 2.0, 2.0), reqs, FidelityModel(), 0.5)
        out = flto_solve(inst)
        # both need node 1 at slots 1 and 2; higher expected fidelity wins
        assert list(out.entries) == [0]
        assert out.is_feasible(inst, check_threshold=True)

    def test_never_beats_ilp(self):
        for seed in range(8):
            inst = tiny_random_instance(seed)
            out = flto_solve(inst)
            assert out.is_feasible(inst, check_threshold=True)
            opt, _ = ilp_optimum(inst, objective="fidelity")
            assert out.expected_fidelity_sum <= opt + 1e-9

    def test_mis_triangle(self):
        inst = mis_reduction(3, [(0, 1), (1, 2), (0, 2)])
        out = flto_solve(inst)
        assert out.accepted_count == 1

    def test_threshold_enforced(self):
        inst = single_edge_instance(fid=0.55)
        inst.threshold = 0.9
        out = flto_solve(inst)
        assert out.accepted_count == 0

    def test_determinism(self):
        a = flto_solve(tiny_random_instance(5))
        b = flto_solve(tiny_random_instance(5))
        assert sorted(a.entries) == sorted(b.entries)
        for rid in a.entries:
            assert a.entries[rid].numerology.key == b.entries[rid].numerology.key

    def test_rei_on_original_knob(self):
        inst = tiny_random_instance(6)
        out = flto_solve(inst, rei_on_original=True)
        assert out.is_feasible(inst, check_threshold=True)
