"""File formats: config, topology, requests, allocations, metrics CSV.

Config files are ``key = value`` lines (``#`` comments allowed) with the
fixed key set below.  Topology files are line-oriented:
``node <id> <x_km> <y_km> <capacity> <swap_prob>`` and
``edge <u> <v> <length_km> <init_fidelity>``; link probabilities are
derived from the config on load (or taken from ``link_prob_override``).
Requests files pin explicit SD pairs and paths:
``request <id> <s> <d> <comma-separated node path>[;<another path>...]``.
"""

from __future__ import annotations

from pathlib import Path as FsPath

import numpy as np

from swapsched.allocation import Allocation, Assigned
from swapsched.fidelity import link_success_prob, path_success_prob
from swapsched.instance import Batch, Instance, Path, Request, ScenarioConfig
from swapsched.strategy import TreeNode, tree_to_numerology
from swapsched.topology import EdgeInfo, NodeInfo, Topology

__all__ = [
    "CONFIG_KEYS",
    "METRICS_HEADER",
    "write_config",
    "read_config",
    "write_topology",
    "read_topology",
    "write_requests",
    "read_requests",
    "instance_from_files",
    "allocation_to_text",
    "allocation_from_text",
    "write_metrics_csv",
    "write_summary_csv",
]

_INT_KEYS = {"num_nodes", "num_requests", "num_slots", "mem_min", "mem_max", "k_paths", "seed", "mc_trials"}
_FLOAT_KEYS = {
    "region_w_km", "region_h_km", "slot_ms", "entangle_ms", "lambda_per_km", "swap_prob",
    "init_fid_min", "init_fid_max", "fidelity_threshold", "epsilon",
    "deco_A", "deco_B", "deco_T_ms", "deco_kappa", "link_prob_override",
}
_STR_KEYS = {"mode"}
CONFIG_KEYS = sorted(_INT_KEYS | _FLOAT_KEYS | _STR_KEYS)

METRICS_HEADER = (
    "scenario_id,seed,algorithm,param_name,param_value,"
    "expected_fidelity_sum,accepted_requests,pre_repair_overload,runtime_ms"
)


def write_config(config: ScenarioConfig, path) -> None:
    lines = []
    for key in CONFIG_KEYS:
        value = getattr(config, key)
        if value is None:
            continue  # link_prob_override is optional
        lines.append(f"{key} = {value}")
    FsPath(path).write_text("\n".join(lines) + "\n")


def read_config(path) -> ScenarioConfig:
    values = {}
    for lineno, raw in enumerate(FsPath(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = (part.strip() for part in line.partition("="))
        if key in _INT_KEYS:
            values[key] = int(val)
        elif key in _FLOAT_KEYS:
            values[key] = float(val)
        elif key in _STR_KEYS:
            values[key] = val
        else:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    if "seed" not in values:
        raise ValueError(f"{path}: missing mandatory key 'seed'")
    return ScenarioConfig(**values)


def write_topology(topology: Topology, path) -> None:
    lines = []
    for node in topology.nodes:
        cap = int(topology.capacity[1][node.id]) if topology.num_slots >= 1 else 0
        lines.append(f"node {node.id} {node.x_km!r} {node.y_km!r} {cap} {node.swap_prob!r}")
    for (u, v), e in sorted(topology.edges.items()):
        lines.append(f"edge {u} {v} {e.length_km!r} {e.init_fidelity!r}")
    FsPath(path).write_text("\n".join(lines) + "\n")


def read_topology(path, config: ScenarioConfig) -> Topology:
    nodes, caps, edges = [], {}, []
    xi = int(config.slot_ms // config.entangle_ms)
    for lineno, raw in enumerate(FsPath(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "node" and len(parts) == 6:
            nid = int(parts[1])
            nodes.append(NodeInfo(nid, float(parts[2]), float(parts[3]), float(parts[5])))
            caps[nid] = int(parts[4])
        elif parts[0] == "edge" and len(parts) == 5:
            u, v = int(parts[1]), int(parts[2])
            length, fid = float(parts[3]), float(parts[4])
            if config.link_prob_override is not None:
                prob = float(config.link_prob_override)
            else:
                prob = link_success_prob(config.lambda_per_km, length, xi)
            edges.append(EdgeInfo(u, v, length, fid, prob))
        else:
            raise ValueError(f"{path}:{lineno}: unrecognized line {raw!r}")
    nodes.sort(key=lambda n: n.id)
    if [n.id for n in nodes] != list(range(len(nodes))):
        raise ValueError(f"{path}: node ids must be 0..n-1")
    capacity = np.zeros((config.num_slots + 1, len(nodes)), dtype=np.int64)
    for nid, c in caps.items():
        capacity[1:, nid] = c
    return Topology(nodes, edges, capacity)


def write_requests(requests, path) -> None:
    lines = []
    for req in requests:
        paths = ";".join(",".join(str(v) for v in p.nodes) for p in req.paths)
        lines.append(f"request {req.id} {req.source} {req.destination} {paths}")
    FsPath(path).write_text("\n".join(lines) + "\n")


def read_requests(path, topology: Topology) -> list[Request]:
    requests = []
    for lineno, raw in enumerate(FsPath(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "request" or len(parts) != 5:
            raise ValueError(f"{path}:{lineno}: unrecognized line {raw!r}")
        rid, s, d = int(parts[1]), int(parts[2]), int(parts[3])
        paths = []
        for chunk in parts[4].split(";"):
            nodes = tuple(int(v) for v in chunk.split(","))
            links = [topology.edge(nodes[a], nodes[a + 1]).link_prob for a in range(len(nodes) - 1)]
            swaps = [topology.swap_prob(v) for v in nodes[1:-1]]
            paths.append(Path(nodes, path_success_prob(links, swaps)))
        requests.append(Request(rid, s, d, tuple(paths)))
    return requests


def instance_from_files(config: ScenarioConfig, topology_path, requests_path=None) -> Instance:
    from swapsched.strategy import min_root_slot
    from swapsched.topology import k_shortest_paths
    from swapsched.instance import substream, _make_path

    topology = read_topology(topology_path, config)
    if requests_path is not None:
        requests = read_requests(requests_path, topology)
    else:
        rng = substream(config.seed, "requests")
        n = topology.num_nodes
        all_pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        if config.num_requests > len(all_pairs):
            raise ValueError("cannot draw that many distinct SD pairs")
        chosen = rng.choice(len(all_pairs), size=config.num_requests, replace=False)
        requests = []
        for rid, idx in enumerate(int(i) for i in chosen):
            s, d = all_pairs[idx]
            paths = [
                _make_path(topology, nodes)
                for nodes in k_shortest_paths(topology, s, d, config.k_paths)
                if min_root_slot(len(nodes) - 1) <= config.num_slots
            ]
            requests.append(Request(rid, s, d, tuple(paths)))
    batch = Batch(config.num_slots, config.slot_ms, config.entangle_ms)
    return Instance(topology, batch, requests, config.fidelity_model(), config.fidelity_threshold, config)


def _tree_to_spec(tree: TreeNode) -> str:
    parts = []

    def walk(node):
        parts.append(f"{node.i}-{node.j}@{node.avail_slot}")
        if not node.is_leaf:
            walk(node.left)
            walk(node.right)

    walk(tree)
    return ";".join(parts)


def _tree_from_spec(spec: str) -> TreeNode:
    tokens = []
    for part in spec.split(";"):
        span, _, slot = part.partition("@")
        i, _, j = span.partition("-")
        tokens.append((int(i), int(j), int(slot)))
    pos = 0

    def build():
        nonlocal pos
        i, j, slot = tokens[pos]
        pos += 1
        if j == i + 1:
            return TreeNode(i, j, slot)
        left = build()
        right = build()
        return TreeNode(i, j, slot, left.j, left, right)

    tree = build()
    if pos != len(tokens):
        raise ValueError("trailing tree tokens")
    return tree


def allocation_to_text(alloc: Allocation) -> str:
    """One record per accepted request: id, path, tree, fidelity, prob."""
    lines = []
    for rid in sorted(alloc.entries):
        a = alloc.entries[rid]
        path = ",".join(str(v) for v in a.path.nodes)
        lines.append(
            f"request {rid} path {path} fidelity {a.fidelity!r} prob {a.prob!r} tree {_tree_to_spec(a.tree)}"
        )
    return "\n".join(lines) + ("\n" if lines else "")


def allocation_from_text(text: str, instance: Instance) -> Allocation:
    alloc = Allocation()
    by_id = {req.id: req for req in instance.requests}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 10 or parts[::2] != ["request", "path", "fidelity", "prob", "tree"]:
            raise ValueError(f"allocation line {lineno}: unrecognized format")
        rid = int(parts[1])
        nodes = tuple(int(v) for v in parts[3].split(","))
        fidelity = float(parts[5])
        prob = float(parts[7])
        tree = _tree_from_spec(parts[9])
        req = by_id[rid]
        p_idx = next(i for i, p in enumerate(req.paths) if p.nodes == nodes)
        alloc.entries[rid] = Assigned(
            rid, p_idx, req.paths[p_idx], tree, tree_to_numerology(tree), prob, fidelity
        )
    return alloc


def _fmt(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_metrics_csv(rows, path) -> None:
    lines = [METRICS_HEADER]
    for row in rows:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    row.scenario_id, row.seed, row.algorithm, row.param_name, row.param_value,
                    row.expected_fidelity_sum, row.accepted_requests, row.pre_repair_overload,
                    row.runtime_ms,
                )
            )
        )
    FsPath(path).write_text("\n".join(lines) + "\n")


def write_summary_csv(summaries, path) -> None:
    header = (
        "param_name,param_value,algorithm,n,"
        "mean_expected_fidelity_sum,se_expected_fidelity_sum,"
        "mean_accepted_requests,se_accepted_requests"
    )
    lines = [header]
    for s in summaries:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    s.param_name, s.param_value, s.algorithm, s.n,
                    s.mean_expected_fidelity_sum, s.se_expected_fidelity_sum,
                    s.mean_accepted_requests, s.se_accepted_requests,
                )
            )
        )
    FsPath(path).write_text("\n".join(lines) + "\n")
