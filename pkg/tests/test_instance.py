"""Topology generation, path enumeration, instance building, MIS reduction."""

import itertools

import numpy as np
import pytest

from swapsched.bruteforce import ilp_optimum, mis_size
from swapsched.instance import ScenarioConfig, build_instance, mis_reduction, substream
from swapsched.strategy import min_root_slot
from swapsched.topology import EdgeInfo, NodeInfo, Topology, k_shortest_paths, waxman_generate


def desk_config(seed=0, **kw):
    base = dict(
        seed=seed, num_nodes=30, num_requests=15, num_slots=13, mem_min=6, mem_max=14
    )
    base.update(kw)
    return ScenarioConfig(**base)


def line_topology(lengths):
    n = len(lengths) + 1
    nodes = [NodeInfo(i, float(i), 0.0, 0.9) for i in range(n)]
    edges = [EdgeInfo(i, i + 1, lengths[i], 0.9, 0.9) for i in range(n - 1)]
    caps = np.full((6, n), 2, dtype=np.int64)
    caps[0] = 0
    return Topology(nodes, edges, caps)


class TestWaxman:
    def test_nodes_inside_region(self):
        cfg = ScenarioConfig(seed=5)
        topo = waxman_generate(cfg, substream(5, "topology"))
        assert topo.num_nodes == 100
        for node in topo.nodes:
            assert 0 <= node.x_km <= 150 and 0 <= node.y_km <= 300

    def test_two_nodes_connect(self):
        cfg = ScenarioConfig(seed=1, num_nodes=2, num_requests=1)
        topo = waxman_generate(cfg, substream(1, "topology"))
        assert len(topo.edges) == 1

    def test_determinism(self):
        cfg = ScenarioConfig(seed=9)
        a = waxman_generate(cfg, substream(9, "topology"))
        b = waxman_generate(cfg, substream(9, "topology"))
        assert [(n.x_km, n.y_km) for n in a.nodes] == [(n.x_km, n.y_km) for n in b.nodes]
        assert list(a.edges) == list(b.edges)
        assert (a.capacity == b.capacity).all()

    def test_calibrated_mean_edge_length(self):
        means = []
        for seed in range(5):
            topo = waxman_generate(ScenarioConfig(seed=seed), substream(seed, "topology"))
            means.append(np.mean([e.length_km for e in topo.edges.values()]))
        assert 27.0 <= np.mean(means) <= 33.0  # within 10% of the 30 km target

    def test_connected(self):
        topo = waxman_generate(desk_config(3), substream(3, "topology"))
        seen = {0}
        stack = [0]
        while stack:
            for nbr, _ in topo.adj[stack.pop()]:
                if nbr not in seen:
                    seen.add(nbr)
                    stack.append(nbr)
        assert len(seen) == topo.num_nodes

    def test_memory_range_and_constant_schedule(self):
        cfg = desk_config(7)
        topo = waxman_generate(cfg, substream(7, "topology"))
        assert topo.capacity[1:].min() >= cfg.mem_min
        assert topo.capacity[1:].max() <= cfg.mem_max
        assert (topo.capacity[1:] == topo.capacity[1]).all()


class TestKShortestPaths:
    def test_line_unique_path(self):
        topo = line_topology([10.0, 10.0])
        assert k_shortest_paths(topo, 0, 2, 3) == [[0, 1, 2]]

    def test_triangle_order(self):
        nodes = [NodeInfo(i, 0.0, 0.0, 0.9) for i in range(3)]
        edges = [EdgeInfo(0, 1, 5.0, 0.9, 0.9), EdgeInfo(1, 2, 5.0, 0.9, 0.9), EdgeInfo(0, 2, 7.0, 0.9, 0.9)]
        caps = np.full((4, 3), 2, dtype=np.int64)
        topo = Topology(nodes, edges, caps)
        assert k_shortest_paths(topo, 0, 2, 2) == [[0, 2], [0, 1, 2]]

    def test_k_zero(self):
        topo = line_topology([1.0])
        assert k_shortest_paths(topo, 0, 1, 0) == []

    def test_disconnected(self):
        nodes = [NodeInfo(i, 0.0, 0.0, 0.9) for i in range(3)]
        edges = [EdgeInfo(0, 1, 5.0, 0.9, 0.9)]
        caps = np.full((4, 3), 2, dtype=np.int64)
        topo = Topology(nodes, edges, caps)
        assert k_shortest_paths(topo, 0, 2, 2) == []

    def test_loopless_and_sorted(self):
        topo = waxman_generate(desk_config(11), substream(11, "topology"))
        paths = k_shortest_paths(topo, 0, topo.num_nodes - 1, 4)
        lengths = []
        for p in paths:
            assert len(set(p)) == len(p)
            lengths.append(sum(topo.edge(p[a], p[a + 1]).length_km for a in range(len(p) - 1)))
        assert lengths == sorted(lengths)


class TestBuildInstance:
    def test_default_counts(self):
        inst = build_instance(desk_config(2))
        assert len(inst.requests) == 15
        assert all(len(r.paths) <= 3 for r in inst.requests)

    def test_pruning_by_horizon(self):
        inst = build_instance(desk_config(2, num_slots=3))
        for req in inst.requests:
            for path in req.paths:
                assert min_root_slot(path.hops) <= 3
                assert path.hops <= 2

    def test_determinism(self):
        a = build_instance(desk_config(4))
        b = build_instance(desk_config(4))
        assert [(r.source, r.destination) for r in a.requests] == [
            (r.source, r.destination) for r in b.requests
        ]
        assert [[p.nodes for p in r.paths] for r in a.requests] == [
            [p.nodes for p in r.paths] for r in b.requests
        ]

    def test_distinct_pairs(self):
        inst = build_instance(desk_config(6))
        pairs = {tuple(sorted((r.source, r.destination))) for r in inst.requests}
        assert len(pairs) == len(inst.requests)

    def test_success_prob_recomputes(self):
        inst = build_instance(desk_config(8))
        for req in inst.requests:
            for path in req.paths:
                assert path.success_prob == pytest.approx(
                    inst.recompute_success_prob(path), abs=1e-12
                )

    def test_too_many_pairs_rejected(self):
        with pytest.raises(ValueError):
            build_instance(ScenarioConfig(seed=0, num_nodes=3, num_requests=4))


class TestMisReduction:
    def test_triangle_shape(self):
        inst = mis_reduction(3, [(0, 1), (1, 2), (0, 2)])
        assert inst.num_slots == 4
        assert len(inst.requests) == 3
        for req in inst.requests:
            assert len(req.paths) == 1
            assert len(req.paths[0].nodes) == 5
            assert req.paths[0].success_prob == 1.0
        # three merges: 3 paths x 5 nodes collapse to 12 distinct nodes
        assert inst.topology.num_nodes == 12

    def test_single_vertex(self):
        inst = mis_reduction(1, [])
        assert inst.num_slots == 2
        assert inst.topology.num_nodes == 2
        value, chosen = ilp_optimum(inst, objective="count")
        assert value == 1

    def test_single_edge_optimum_one(self):
        inst = mis_reduction(2, [(0, 1)])
        assert inst.topology.num_nodes == 5
        value, _ = ilp_optimum(inst, objective="count")
        assert value == 1

    def test_capacities(self):
        inst = mis_reduction(3, [(0, 1)])
        cap = inst.topology.capacity
        for req in inst.requests:
            nodes = req.paths[0].nodes
            assert cap[1][nodes[0]] == 1 and cap[1][nodes[-1]] == 1
            assert all(cap[1][v] == 2 for v in nodes[1:-1])

    @pytest.mark.parametrize("nv", [1, 2, 3, 4])
    def test_optimum_equals_mis_size_small(self, nv):
        # acceptance covers all graphs up to 5 vertices; keep <=4 here
        all_edges = list(itertools.combinations(range(nv), 2))
        for bits in range(1 << len(all_edges)):
            edges = [e for i, e in enumerate(all_edges) if bits >> i & 1]
            inst = mis_reduction(nv, edges)
            value, _ = ilp_optimum(inst, objective="count")
            assert value == mis_size(nv, edges), f"nv={nv} edges={edges}"
