"""Round trips for the file formats."""

import pytest

from swapsched.fnpr import fnpr_solve
from swapsched.instance import ScenarioConfig, mis_reduction, substream
from swapsched.serialize import (
    METRICS_HEADER,
    allocation_from_text,
    allocation_to_text,
    instance_from_files,
    read_config,
    read_requests,
    read_topology,
    write_config,
    write_metrics_csv,
    write_requests,
    write_topology,
)
from swapsched.topology import waxman_generate

from tests.test_fnpr import tiny_random_instance


def small_config(seed=3):
    return ScenarioConfig(seed=seed, num_nodes=12, num_requests=5, num_slots=6)


class TestConfigFile:
    def test_round_trip(self, tmp_path):
        cfg = small_config()
        path = tmp_path / "config.txt"
        write_config(cfg, path)
        back = read_config(path)
        for key in (
            "seed", "num_nodes", "num_requests", "num_slots", "slot_ms", "mode",
            "fidelity_threshold", "epsilon", "deco_kappa", "mc_trials",
        ):
            assert getattr(back, key) == getattr(cfg, key)

    def test_optional_override(self, tmp_path):
        cfg = small_config().with_(link_prob_override=0.01)
        path = tmp_path / "config.txt"
        write_config(cfg, path)
        assert read_config(path).link_prob_override == 0.01

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "config.txt"
        path.write_text("seed = 1\nbogus = 2\n")
        with pytest.raises(ValueError):
            read_config(path)

    def test_missing_seed_rejected(self, tmp_path):
        path = tmp_path / "config.txt"
        path.write_text("num_nodes = 5\n")
        with pytest.raises(ValueError):
            read_config(path)

    def test_comments_ignored(self, tmp_path):
        path = tmp_path / "config.txt"
        path.write_text("# scenario\nseed = 7\nnum_nodes = 9  # small\n")
        cfg = read_config(path)
        assert cfg.seed == 7 and cfg.num_nodes == 9


class TestTopologyFile:
    def test_round_trip(self, tmp_path):
        cfg = small_config()
        topo = waxman_generate(cfg, substream(cfg.seed, "topology"))
        path = tmp_path / "topo.txt"
        write_topology(topo, path)
        back = read_topology(path, cfg)
        assert back.num_nodes == topo.num_nodes
        assert sorted(back.edges) == sorted(topo.edges)
        assert (back.capacity == topo.capacity).all()
        for key in topo.edges:
            assert back.edges[key].init_fidelity == topo.edges[key].init_fidelity
            assert back.edges[key].link_prob == pytest.approx(topo.edges[key].link_prob, abs=1e-12)

    def test_override_applies_on_load(self, tmp_path):
        cfg = small_config()
        topo = waxman_generate(cfg, substream(cfg.seed, "topology"))
        path = tmp_path / "topo.txt"
        write_topology(topo, path)
        back = read_topology(path, cfg.with_(link_prob_override=0.5))
        assert all(e.link_prob == 0.5 for e in back.edges.values())


class TestRequestsFile:
    def test_round_trip_mis_instance(self, tmp_path):
        inst = mis_reduction(3, [(0, 1), (1, 2)])
        tpath, rpath = tmp_path / "topo.txt", tmp_path / "reqs.txt"
        write_topology(inst.topology, tpath)
        write_requests(inst.requests, rpath)
        back = read_requests(rpath, inst.topology)
        assert [(r.id, r.source, r.destination) for r in back] == [
            (r.id, r.source, r.destination) for r in inst.requests
        ]
        assert all(
            b.paths[0].nodes == r.paths[0].nodes and b.paths[0].success_prob == 1.0
            for b, r in zip(back, inst.requests)
        )

    def test_instance_from_files(self, tmp_path):
        inst = mis_reduction(2, [(0, 1)])
        cfg = ScenarioConfig(
            seed=0, num_nodes=inst.topology.num_nodes, num_requests=2,
            num_slots=inst.num_slots, link_prob_override=1.0, swap_prob=1.0,
            mem_min=1, mem_max=2, fidelity_threshold=0.0, mode="tetris_n",
        )
        tpath, rpath = tmp_path / "topo.txt", tmp_path / "reqs.txt"
        write_topology(inst.topology, tpath)
        write_requests(inst.requests, rpath)
        loaded = instance_from_files(cfg, tpath, rpath)
        from swapsched.bruteforce import ilp_optimum

        value, _ = ilp_optimum(loaded, objective="count")
        assert value == 1


class TestAllocationText:
    def test_round_trip(self):
        inst = tiny_random_instance(1)
        alloc = fnpr_solve(inst, mode="tetris_n", epsilon=0.1, seed=1)
        text = allocation_to_text(alloc)
        back = allocation_from_text(text, inst)
        assert sorted(back.entries) == sorted(alloc.entries)
        for rid in alloc.entries:
            a, b = alloc.entries[rid], back.entries[rid]
            assert a.tree == b.tree and a.fidelity == b.fidelity and a.prob == b.prob

    def test_empty(self):
        from swapsched.allocation import Allocation

        assert allocation_to_text(Allocation()) == ""


class TestMetricsCsv:
    def test_header_exact(self, tmp_path):
        from swapsched.harness import MetricsRow

        row = MetricsRow("sc-1", 0, "flto", "", "", 1.5, 3, None, 12.0)
        path = tmp_path / "m.csv"
        write_metrics_csv([row], path)
        lines = path.read_text().splitlines()
        assert lines[0] == METRICS_HEADER
        assert lines[1].startswith("sc-1,0,flto,,,1.5,3,,")
