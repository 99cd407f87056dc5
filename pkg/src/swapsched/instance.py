"""Problem instances: scenario configuration, batches, requests, path sets.

A master seed derives independent named substreams (topology, requests,
rounding, monte carlo, sweeps) so that toggling one consumer never perturbs
the draws of another.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from swapsched.fidelity import FidelityModel, path_success_prob
from swapsched.strategy import min_root_slot
from swapsched.topology import EdgeInfo, NodeInfo, Topology, k_shortest_paths, waxman_generate

__all__ = [
    "ScenarioConfig",
    "Batch",
    "Path",
    "Request",
    "Instance",
    "substream",
    "build_instance",
    "mis_reduction",
]

_STREAMS = {"topology": 0, "requests": 1, "rounding": 2, "monte_carlo": 3, "sweep": 4}


def substream(seed: int, name: str, *extra: int) -> np.random.Generator:
    """Independent generator for one named consumer of the master seed."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), _STREAMS[name], *extra]))


@dataclass(frozen=True)
class ScenarioConfig:
    """All generation and solver parameters for one scenario."""

    seed: int
    num_nodes: int = 100
    region_w_km: float = 150.0
    region_h_km: float = 300.0
    num_requests: int = 50
    num_slots: int = 13
    slot_ms: float = 2.0
    entangle_ms: float = 0.25
    lambda_per_km: float = 0.045
    swap_prob: float = 0.9
    init_fid_min: float = 0.7
    init_fid_max: float = 0.98
    mem_min: int = 6
    mem_max: int = 14
    fidelity_threshold: float = 0.5
    k_paths: int = 3
    epsilon: float = 0.1
    deco_A: float = 0.25
    deco_B: float = 0.75
    deco_T_ms: float = 40.0
    deco_kappa: float = 2.0
    mode: str = "tetris"
    mc_trials: int = 1000
    link_prob_override: Optional[float] = None
    # generator knobs outside the config-file schema, overridable in code
    waxman_beta: float = 0.85
    waxman_alpha: float = 0.053

    def __post_init__(self):
        if self.mode not in ("tetris", "tetris_n"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 0.0 <= self.fidelity_threshold <= 1.0:
            raise ValueError("fidelity threshold must lie in [0, 1]")
        if self.init_fid_min > self.init_fid_max or self.mem_min > self.mem_max:
            raise ValueError("degenerate value range")
        if self.init_fid_min <= self.deco_A:
            raise ValueError("initial fidelities must exceed the decoherence asymptote")
        if not 0.0 < self.epsilon <= 0.5:
            raise ValueError("epsilon must lie in (0, 0.5]")
        if self.num_slots < 2:
            raise ValueError("a batch needs at least two slots")

    def fidelity_model(self) -> FidelityModel:
        return FidelityModel(self.deco_A, self.deco_B, self.deco_T_ms, self.deco_kappa, self.slot_ms)

    def with_(self, **kw) -> "ScenarioConfig":
        return replace(self, **kw)


@dataclass(frozen=True)
class Batch:
    """The synchronized slot batch: slots are indexed 1..num_slots."""

    num_slots: int
    tau_ms: float
    entangle_ms: float

    @property
    def xi(self) -> int:
        return int(self.tau_ms // self.entangle_ms)

    def __post_init__(self):
        if self.xi < 1:
            raise ValueError("slot too short for a single entangling attempt")


@dataclass(frozen=True)
class Path:
    nodes: tuple[int, ...]
    success_prob: float

    @property
    def hops(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True)
class Request:
    id: int
    source: int
    destination: int
    paths: tuple[Path, ...]


class Instance:
    """Topology + batch + requests, ready for the planners."""

    def __init__(self, topology: Topology, batch: Batch, requests, model: FidelityModel,
                 threshold: float, config: Optional[ScenarioConfig] = None):
        self.topology = topology
        self.batch = batch
        self.requests = list(requests)
        self.model = model
        self.threshold = threshold
        self.config = config

    @property
    def num_slots(self) -> int:
        return self.batch.num_slots

    def path_caps(self, path: Path, capacity: Optional[np.ndarray] = None):
        """Per-position capacity rows for the DP: caps[t][pos], pos 1-based."""
        cap = self.topology.capacity if capacity is None else capacity
        n = len(path.nodes)
        rows = [[0] * (n + 1)]
        for t in range(1, self.num_slots + 1):
            row = cap[t]
            rows.append([0] + [int(row[v]) for v in path.nodes])
        return rows

    def path_edge_fidelities(self, path: Path) -> list[float]:
        topo = self.topology
        return [topo.edge(path.nodes[a], path.nodes[a + 1]).init_fidelity for a in range(path.hops)]

    def recompute_success_prob(self, path: Path) -> float:
        topo = self.topology
        links = [topo.edge(path.nodes[a], path.nodes[a + 1]).link_prob for a in range(path.hops)]
        swaps = [topo.swap_prob(v) for v in path.nodes[1:-1]]
        return path_success_prob(links, swaps)


def _make_path(topology: Topology, nodes) -> Path:
    links = [topology.edge(nodes[a], nodes[a + 1]).link_prob for a in range(len(nodes) - 1)]
    swaps = [topology.swap_prob(v) for v in nodes[1:-1]]
    return Path(tuple(nodes), path_success_prob(links, swaps))


def build_instance(config: ScenarioConfig, rng: Optional[np.random.Generator] = None) -> Instance:
    """Topology plus distinct random SD pairs with pruned path sets.

    Paths whose hop count cannot host any feasible tree within the batch
    (earliest root slot past the horizon) are dropped.
    """
    topo_rng = substream(config.seed, "topology") if rng is None else rng
    req_rng = substream(config.seed, "requests") if rng is None else rng
    topology = waxman_generate(config, topo_rng)
    n = config.num_nodes
    all_pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if config.num_requests > len(all_pairs):
        raise ValueError("cannot draw that many distinct SD pairs")
    chosen = req_rng.choice(len(all_pairs), size=config.num_requests, replace=False)
    requests = []
    for rid, idx in enumerate(int(i) for i in chosen):
        s, d = all_pairs[idx]
        paths = []
        for nodes in k_shortest_paths(topology, s, d, config.k_paths):
            hops = len(nodes) - 1
            if min_root_slot(hops) <= config.num_slots:
                paths.append(_make_path(topology, nodes))
        requests.append(Request(rid, s, d, tuple(paths)))
    batch = Batch(config.num_slots, config.slot_ms, config.entangle_ms)
    return Instance(topology, batch, requests, config.fidelity_model(), config.fidelity_threshold, config)


def mis_reduction(num_vertices: int, mis_edges, slot_ms: float = 2.0) -> Instance:
    """Adversarial instance whose accepted-request optimum is the MIS size.

    One request per vertex, each on a dedicated path of ``2**ceil(log2 nv)``
    edges inside a batch just long enough for the perfect binary tree, which
    is then the only feasible schedule.  For every graph edge, one fresh
    interior node from each endpoint's path is merged, so neighbouring
    requests contend for the merged node's two memory units.
    """
    if num_vertices < 1:
        raise ValueError("empty graph")
    levels = math.ceil(math.log2(num_vertices)) if num_vertices > 1 else 0
    hops = 2**levels
    num_slots = levels + 2

    next_id = 0

    def fresh() -> int:
        nonlocal next_id
        next_id += 1
        return next_id - 1

    path_nodes = []
    for _ in range(num_vertices):
        path_nodes.append([fresh() for _ in range(hops + 1)])

    unpicked = [list(range(1, hops)) for _ in range(num_vertices)]  # interior positions
    merged_into: dict[int, int] = {}
    for a, b in sorted({tuple(sorted(e)) for e in mis_edges}):
        if a == b or not (0 <= a < num_vertices and 0 <= b < num_vertices):
            raise ValueError(f"bad edge ({a}, {b})")
        if not unpicked[a] or not unpicked[b]:
            raise ValueError(f"path of vertex {a if not unpicked[a] else b} ran out of interior nodes")
        pa = unpicked[a].pop(0)
        pb = unpicked[b].pop(0)
        merged_into[path_nodes[b][pb]] = path_nodes[a][pa]

    def resolve(node):
        while node in merged_into:
            node = merged_into[node]
        return node

    for nodes in path_nodes:
        for i, v in enumerate(nodes):
            nodes[i] = resolve(v)

    used = sorted({v for nodes in path_nodes for v in nodes})
    remap = {v: i for i, v in enumerate(used)}
    endpoint_ids = set()
    for nodes in path_nodes:
        for i, v in enumerate(nodes):
            nodes[i] = remap[v]
        endpoint_ids.add(nodes[0])
        endpoint_ids.add(nodes[-1])

    n = len(used)
    nodes_info = [NodeInfo(i, float(i), 0.0, 1.0) for i in range(n)]
    capacity = np.zeros((num_slots + 1, n), dtype=np.int64)
    for v in range(n):
        capacity[1:, v] = 1 if v in endpoint_ids else 2
    edges = {}
    for nodes in path_nodes:
        for a in range(len(nodes) - 1):
            key = (min(nodes[a], nodes[a + 1]), max(nodes[a], nodes[a + 1]))
            edges.setdefault(key, EdgeInfo(key[0], key[1], 0.0, 1.0, 1.0))
    topology = Topology(nodes_info, list(edges.values()), capacity)

    requests = []
    for rid, nodes in enumerate(path_nodes):
        requests.append(
            Request(rid, nodes[0], nodes[-1], (Path(tuple(nodes), 1.0),))
        )
    batch = Batch(num_slots, slot_ms, slot_ms)  # one attempt per slot, prob 1 anyway
    model = FidelityModel(tau_ms=slot_ms)
    return Instance(topology, batch, requests, model, 0.0)
