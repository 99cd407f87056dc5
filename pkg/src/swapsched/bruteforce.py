"""Exhaustive oracles for desk-scale validation.

Enumerates every capacity-feasible column (request, path, numerology) and
solves the selection problem exactly by depth-first search with an
optimistic-bound cut.  Only meant for tiny instances; enumeration guards
apply.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from swapsched.instance import Instance
from swapsched.strategy import Numerology, TreeNode, enumerate_numerologies, evaluate_fidelity

__all__ = ["OracleColumn", "enumerate_columns", "ilp_optimum", "mis_size"]


@dataclass(frozen=True)
class OracleColumn:
    request_id: int
    path_idx: int
    tree: TreeNode
    numerology: Numerology
    prob: float
    fidelity: float
    cells: tuple  # ((slot, node_id), units), node-mapped occupancy


def enumerate_columns(instance: Instance, max_hops: int = 8) -> dict[int, list[OracleColumn]]:
    """All feasible columns per request, node-mapped to the instance."""
    cap = instance.topology.capacity
    out: dict[int, list[OracleColumn]] = {}
    for req in instance.requests:
        cols = []
        for p_idx, path in enumerate(req.paths):
            nodes = path.nodes
            caps = lambda t, pos: int(cap[t][nodes[pos - 1]])
            edge_f = instance.path_edge_fidelities(path)
            for tree, m in enumerate_numerologies(
                len(nodes), instance.num_slots, caps, max_hops=max_hops
            ):
                fid = evaluate_fidelity(tree, edge_f, instance.model)
                cells = tuple(
                    ((t, nodes[pos - 1]), units) for (t, pos), units in sorted(m.theta_items())
                )
                cols.append(OracleColumn(req.id, p_idx, tree, m, path.success_prob, fid, cells))
        out[req.id] = cols
    return out


def _column_value(col: OracleColumn, objective: str) -> float:
    if objective == "fidelity":
        return col.prob * col.fidelity
    if objective == "fidelity_free":
        return col.prob
    if objective == "count":
        return 1.0
    raise ValueError(f"unknown objective {objective!r}")


def ilp_optimum(
    instance: Instance,
    objective: str = "fidelity",
    columns: dict[int, list[OracleColumn]] | None = None,
) -> tuple[float, dict[int, OracleColumn]]:
    """Exact optimum over all column selections, one per request.

    ``fidelity`` maximizes the expected fidelity sum subject to the
    instance's threshold; ``fidelity_free`` and ``count`` ignore fidelity.
    Returns the optimum value and one argmax assignment.
    """
    if columns is None:
        columns = enumerate_columns(instance)
    cap = instance.topology.capacity
    reqs = sorted(columns)
    pools = []
    for rid in reqs:
        pool = columns[rid]
        if objective == "fidelity":
            pool = [c for c in pool if c.fidelity >= instance.threshold]
        pool = sorted(pool, key=lambda c: -_column_value(c, objective))
        pools.append(pool)
    suffix_best = [0.0] * (len(reqs) + 1)
    for i in range(len(reqs) - 1, -1, -1):
        head = pools[i][0] if pools[i] else None
        suffix_best[i] = suffix_best[i + 1] + (_column_value(head, objective) if head else 0.0)

    used: dict[tuple[int, int], int] = {}
    best = {"value": 0.0, "assignment": {}}
    chosen: dict[int, OracleColumn] = {}

    def fits(col: OracleColumn) -> bool:
        return all(used.get(cell, 0) + units <= cap[cell[0]][cell[1]] for cell, units in col.cells)

    def dfs(i: int, value: float):
        if value > best["value"] + 1e-15:
            best["value"] = value
            best["assignment"] = dict(chosen)
        if i == len(reqs) or value + suffix_best[i] <= best["value"] + 1e-15:
            return
        for col in pools[i]:
            if fits(col):
                for cell, units in col.cells:
                    used[cell] = used.get(cell, 0) + units
                chosen[reqs[i]] = col
                dfs(i + 1, value + _column_value(col, objective))
                del chosen[reqs[i]]
                for cell, units in col.cells:
                    used[cell] -= units
        dfs(i + 1, value)

    dfs(0, 0.0)
    return best["value"], best["assignment"]


def mis_size(num_vertices: int, edges) -> int:
    """Maximum independent set size by subset enumeration (tiny graphs)."""
    edge_set = {tuple(sorted(e)) for e in edges}
    best = 0
    for r in range(num_vertices, 0, -1):
        for subset in itertools.combinations(range(num_vertices), r):
            ok = all(tuple(sorted((a, b))) not in edge_set for a, b in itertools.combinations(subset, 2))
            if ok:
                return r
    return best
