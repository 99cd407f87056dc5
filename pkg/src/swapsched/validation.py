"""Input validation for instances fed to the planners."""

from __future__ import annotations

from swapsched.instance import Instance
from swapsched.strategy import min_root_slot

__all__ = ["check_instance"]


def check_instance(instance: Instance) -> Instance:
    """Raise ValueError on structural problems; returns the instance."""
    topo = instance.topology
    if topo.capacity.shape[0] != instance.num_slots + 1:
        raise ValueError("capacity schedule does not cover the batch horizon")
    seen = set()
    for req in instance.requests:
        if req.id in seen:
            raise ValueError(f"duplicate request id {req.id}")
        seen.add(req.id)
        for path in req.paths:
            nodes = path.nodes
            if nodes[0] != req.source or nodes[-1] != req.destination:
                raise ValueError(f"request {req.id}: path endpoints do not match")
            if len(set(nodes)) != len(nodes):
                raise ValueError(f"request {req.id}: path is not simple")
            for a in range(len(nodes) - 1):
                if not topo.has_edge(nodes[a], nodes[a + 1]):
                    raise ValueError(f"request {req.id}: missing edge {nodes[a]}-{nodes[a + 1]}")
            if min_root_slot(path.hops) > instance.num_slots:
                raise ValueError(f"request {req.id}: path cannot fit the batch horizon")
            recomputed = instance.recompute_success_prob(path)
            if abs(recomputed - path.success_prob) > 1e-9:
                raise ValueError(
                    f"request {req.id}: stored success prob {path.success_prob} "
                    f"differs from recomputation {recomputed}"
                )
    if not 0.0 <= instance.threshold <= 1.0:
        raise ValueError("fidelity threshold must lie in [0, 1]")
    return instance
