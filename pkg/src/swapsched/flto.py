"""Greedy allocation steered by a resource-efficiency index.

Each round scores, for every unsaturated request and path, two candidate
schedules against the residual capacities: the max-fidelity numerology and
the min-footprint numerology (weights are reciprocal residual capacity).
The candidate with the highest expected fidelity per unit of
capacity-normalized occupancy wins the round and its memory is committed.
A request whose paths yield no candidate can never gain one back (capacity
only shrinks), so it is retired immediately.
"""

from __future__ import annotations



from swapsched.allocation import Allocation, Assigned
from swapsched.dp import max_fidelity_numerology, min_weight_numerology
from swapsched.instance import Instance, Path
from swapsched.strategy import Numerology, evaluate_fidelity

__all__ = ["rei", "flto_solve"]


def rei(prob: float, fidelity: float, m: Numerology, residual_rows) -> float:
    """Expected fidelity per unit of capacity-normalized memory occupancy."""
    denom = 0.0
    for (t, pos), units in m.theta_items():
        denom += units / residual_rows[t][pos]
    if denom <= 0.0:
        raise ValueError("numerology occupies no cells")
    return prob * fidelity / denom


def _residual_rows(residual, path: Path, num_slots: int):
    n = len(path.nodes)
    rows = [[0] * (n + 1)]
    for t in range(1, num_slots + 1):
        row = residual[t]
        rows.append([0] + [int(row[v]) for v in path.nodes])
    return rows


def flto_solve(instance: Instance, rei_on_original: bool = False) -> Allocation:
    """Round-by-round greedy over the two DP candidates per (request, path).

    ``rei_on_original`` scores candidates against the instance capacities
    instead of the residual ones (diagnostic knob; the default follows the
    residual view of current utilization).
    """
    num_slots = instance.num_slots
    threshold = instance.threshold
    residual = instance.topology.capacity.copy()
    original = instance.topology.capacity
    alloc = Allocation()
    pending = {req.id: req for req in instance.requests if req.paths}

    while pending:
        best = None  # (-rei, -expected_fid, kind, req_id, path_idx, payload)
        dead = []
        for rid in sorted(pending):
            req = pending[rid]
            found = False
            for p_idx, path in enumerate(req.paths):
                n = len(path.nodes)
                cap_rows = _residual_rows(residual, path, num_slots)
                score_cap = (
                    _residual_rows(original, path, num_slots) if rei_on_original else cap_rows
                )
                inv_rows = [
                    [0.0] + [1.0 / c if c > 0 else 0.0 for c in row[1:]] for row in score_cap
                ]
                edge_f = instance.path_edge_fidelities(path)
                candidates = []
                m1 = max_fidelity_numerology(n, num_slots, cap_rows, edge_f, instance.model, threshold)
                if m1 is not None:
                    candidates.append((0, m1[0], m1[1], m1[2]))
                m2 = min_weight_numerology(n, num_slots, cap_rows, inv_rows)
                if m2 is not None:
                    fid2 = evaluate_fidelity(m2[0], edge_f, instance.model)
                    if fid2 >= threshold:
                        candidates.append((1, m2[0], m2[1], fid2))
                for kind, tree, m, fid in candidates:
                    found = True
                    score = rei(path.success_prob, fid, m, score_cap)
                    key = (-score, -path.success_prob * fid, kind, rid, p_idx)
                    if best is None or key < best[0]:
                        best = (key, rid, p_idx, path, tree, m, fid)
            if not found:
                dead.append(rid)
        for rid in dead:
            del pending[rid]
        if best is None:
            break
        _, rid, p_idx, path, tree, m, fid = best
        alloc.entries[rid] = Assigned(rid, p_idx, path, tree, m, path.success_prob, fid)
        nodes = path.nodes
        for (t, pos), units in m.theta_items():
            residual[t][nodes[pos - 1]] -= units
        if (residual < 0).any():
            raise AssertionError("residual capacity went negative")
        del pending[rid]
    return alloc
