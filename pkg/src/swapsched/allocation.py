"""Integral plan produced by any planner: one schedule per accepted request."""

from __future__ import annotations

from dataclasses import dataclass, field

from swapsched.instance import Instance, Path
from swapsched.strategy import Numerology, TreeNode

__all__ = ["Assigned", "Allocation"]


@dataclass(frozen=True)
class Assigned:
    request_id: int
    path_idx: int
    path: Path
    tree: TreeNode
    numerology: Numerology
    prob: float
    fidelity: float

    @property
    def expected_fidelity(self) -> float:
        return self.prob * self.fidelity

    def cells(self):
        nodes = self.path.nodes
        for (t, pos), units in self.numerology.theta_items():
            yield (t, nodes[pos - 1]), units


@dataclass
class Allocation:
    entries: dict[int, Assigned] = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def accepted_count(self) -> int:
        return len(self.entries)

    @property
    def expected_fidelity_sum(self) -> float:
        return sum(a.expected_fidelity for a in self.entries.values())

    @property
    def fidelity_free_objective(self) -> float:
        return sum(a.prob for a in self.entries.values())

    def loads(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for a in self.entries.values():
            for cell, units in a.cells():
                out[cell] = out.get(cell, 0) + units
        return out

    def max_overload_factor(self, instance: Instance) -> float:
        cap = instance.topology.capacity
        worst = 0.0
        for (t, v), load in self.loads().items():
            worst = max(worst, load / cap[t][v])
        return worst

    def is_feasible(self, instance: Instance, check_threshold: bool = False) -> bool:
        cap = instance.topology.capacity
        for (t, v), load in self.loads().items():
            if load > cap[t][v]:
                return False
        if check_threshold:
            if any(a.fidelity < instance.threshold for a in self.entries.values()):
                return False
        return True
