"""Random network topologies and loopless path enumeration.

Waxman-style generation over a rectangular region: every node pair keeps its
candidate edge with probability ``beta * exp(-d / (alpha * L))`` where ``L``
is the region diagonal, then the shortest missing inter-component edges are
added until the graph is connected.  ``alpha`` was calibrated numerically so
the realized mean edge length lands near 30 km for 100 nodes on the default
150 x 300 km region (see README).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from swapsched.fidelity import link_success_prob

__all__ = ["NodeInfo", "EdgeInfo", "Topology", "waxman_generate", "k_shortest_paths"]

WAXMAN_BETA = 0.85
WAXMAN_ALPHA = 0.053  # calibrated: mean kept-edge length ~30 km at 100 nodes


@dataclass(frozen=True)
class NodeInfo:
    id: int
    x_km: float
    y_km: float
    swap_prob: float


@dataclass(frozen=True)
class EdgeInfo:
    u: int
    v: int
    length_km: float
    init_fidelity: float
    link_prob: float


class Topology:
    """Undirected network with a per-slot memory schedule.

    ``capacity[t, v]`` (slot-major, row 0 unused) is the memory limit of node
    ``v`` during slot ``t``; the schedule is total over its domain.
    """

    def __init__(self, nodes: list[NodeInfo], edges: list[EdgeInfo], capacity: np.ndarray):
        self.nodes = list(nodes)
        self.capacity = np.asarray(capacity, dtype=np.int64)
        if self.capacity.shape[1] != len(nodes):
            raise ValueError("capacity schedule does not cover all nodes")
        if (self.capacity < 0).any():
            raise ValueError("capacities must be nonnegative")
        self.edges: dict[tuple[int, int], EdgeInfo] = {}
        self.adj: dict[int, list[tuple[int, float]]] = {n.id: [] for n in nodes}
        for e in edges:
            key = (min(e.u, e.v), max(e.u, e.v))
            if key in self.edges or e.u == e.v:
                raise ValueError(f"duplicate or self edge {key}")
            self.edges[key] = e
            self.adj[e.u].append((e.v, e.length_km))
            self.adj[e.v].append((e.u, e.length_km))
        for lst in self.adj.values():
            lst.sort()

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_slots(self) -> int:
        return self.capacity.shape[0] - 1

    def edge(self, u: int, v: int) -> EdgeInfo:
        return self.edges[(min(u, v), max(u, v))]

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def swap_prob(self, v: int) -> float:
        return self.nodes[v].swap_prob


def _components(n: int, edge_keys) -> list[set[int]]:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edge_keys:
        ra, rb = find(u), find(v)
        if ra != rb:
            parent[ra] = rb
    comps: dict[int, set[int]] = {}
    for v in range(n):
        comps.setdefault(find(v), set()).add(v)
    return list(comps.values())


def waxman_generate(config, rng: np.random.Generator) -> Topology:
    """Connected random topology for one scenario.

    Node memories are integer-uniform in ``[mem_min, mem_max]`` and constant
    across slots; edge fidelities are uniform in the configured range; link
    probabilities follow the attempt model unless ``link_prob_override`` is
    set, mirroring experiments that treat the entangling probability as an
    abstract input.
    """
    n = config.num_nodes
    if n < 2:
        raise ValueError("need at least two nodes")
    width, height = config.region_w_km, config.region_h_km
    xs = rng.uniform(0.0, width, n)
    ys = rng.uniform(0.0, height, n)
    diag = math.hypot(width, height)
    alpha = getattr(config, "waxman_alpha", WAXMAN_ALPHA)
    beta = getattr(config, "waxman_beta", WAXMAN_BETA)

    def dist(u, v):
        return math.hypot(xs[u] - xs[v], ys[u] - ys[v])

    kept: list[tuple[int, int]] = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < beta * math.exp(-dist(u, v) / (alpha * diag)):
                kept.append((u, v))

    # connectivity repair: repeatedly add the shortest missing edge that
    # bridges two components (ties broken by node ids for determinism)
    comps = _components(n, kept)
    while len(comps) > 1:
        best = None
        for a in range(len(comps)):
            for b in range(a + 1, len(comps)):
                for u in sorted(comps[a]):
                    for v in sorted(comps[b]):
                        key = (dist(u, v), min(u, v), max(u, v))
                        if best is None or key < best:
                            best = key
        _, u, v = best
        kept.append((u, v))
        comps = _components(n, kept)
    kept.sort()

    caps_per_node = rng.integers(config.mem_min, config.mem_max + 1, n)
    capacity = np.zeros((config.num_slots + 1, n), dtype=np.int64)
    capacity[1:, :] = caps_per_node

    xi = int(config.slot_ms // config.entangle_ms)
    edges = []
    for u, v in kept:
        init_fid = float(rng.uniform(config.init_fid_min, config.init_fid_max))
        length = dist(u, v)
        if config.link_prob_override is not None:
            prob = float(config.link_prob_override)
        else:
            prob = link_success_prob(config.lambda_per_km, length, xi)
        edges.append(EdgeInfo(u, v, length, init_fid, prob))

    nodes = [NodeInfo(i, float(xs[i]), float(ys[i]), config.swap_prob) for i in range(n)]
    return Topology(nodes, edges, capacity)


def _dijkstra(adj, source, target, removed_nodes, removed_edges):
    """Shortest path by length with lexicographic node-sequence tie-break."""
    heap = [(0.0, (source,))]
    settled = set()
    while heap:
        cost, path = heapq.heappop(heap)
        node = path[-1]
        if node == target:
            return cost, list(path)
        if node in settled:
            continue
        settled.add(node)
        for nbr, length in adj[node]:
            if nbr in settled or nbr in removed_nodes:
                continue
            if (node, nbr) in removed_edges or (nbr, node) in removed_edges:
                continue
            heapq.heappush(heap, (cost + length, path + (nbr,)))
    return None


def k_shortest_paths(topology: Topology, s: int, d: int, k: int) -> list[list[int]]:
    """Up to ``k`` loopless paths in ascending length, Yen-style.

    Equal-length paths order lexicographically by their node sequences.
    Returns node-id lists; an unreachable target yields an empty list.
    """
    if s == d:
        raise ValueError("source equals destination")
    if k <= 0:
        return []
    adj = topology.adj
    first = _dijkstra(adj, s, d, frozenset(), frozenset())
    if first is None:
        return []
    found: list[tuple[float, list[int]]] = [first]
    candidates: list[tuple[float, tuple[int, ...]]] = []
    seen = {tuple(first[1])}
    while len(found) < k:
        _, last = found[-1]
        for i in range(len(last) - 1):
            spur = last[i]
            root = last[: i + 1]
            root_len = sum(topology.edge(root[a], root[a + 1]).length_km for a in range(i))
            removed_edges = set()
            for _, p in found:
                if p[: i + 1] == root and len(p) > i + 1:
                    removed_edges.add((p[i], p[i + 1]))
            removed_nodes = frozenset(root[:-1])
            spur_path = _dijkstra(adj, spur, d, removed_nodes, removed_edges)
            if spur_path is None:
                continue
            total = root[:-1] + spur_path[1]
            key = tuple(total)
            if key not in seen:
                seen.add(key)
                heapq.heappush(candidates, (root_len + spur_path[0], key))
        if not candidates:
            break
        cost, best = heapq.heappop(candidates)
        found.append((cost, list(best)))
    return [p for _, p in found]
