"""Strategy trees, numerologies, and the bijection between them.

A strategy tree fixes, for one path, when every link is entangled and when
every swap runs inside the slot batch.  Its numerology is the induced memory
footprint theta(t, v).  Positions are 1-based indices into the path's node
sequence; slots are 1-based within the batch.

Occupancy convention: a non-root pair available from slot ``t_a`` and
consumed by its parent at slot ``t_p`` holds one memory unit at both
endpoints over ``[t_a, t_p)``; a leaf additionally holds its endpoints at the
entangling slot ``t_a - 1``; the end-to-end root pair holds exactly its own
slot.  This matches the capacity checks of the planning recursions, which
examine both ``t`` and ``t - 1`` at leaf creation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

from swapsched.fidelity import FidelityModel, decay_one_slot, swap_with_decay

__all__ = [
    "TreeNode",
    "Numerology",
    "MalformedNumerologyError",
    "EnumerationGuardError",
    "min_root_slot",
    "tree_to_numerology",
    "numerology_to_tree",
    "evaluate_fidelity",
    "enumerate_numerologies",
    "resource_cost",
    "tree_debug_str",
    "mirror_tree",
]


class MalformedNumerologyError(ValueError):
    """The occupancy distribution does not decompose into a strategy tree."""


class EnumerationGuardError(ValueError):
    """Exhaustive enumeration was asked for an instance above its guard."""


@dataclass(frozen=True)
class TreeNode:
    """One pair in a strategy tree, spanning path positions ``i..j``."""

    i: int
    j: int
    avail_slot: int
    split: Optional[int] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.j == self.i + 1

    def __post_init__(self):
        if not self.i < self.j:
            raise ValueError(f"bad span ({self.i}, {self.j})")
        if self.is_leaf:
            if self.split is not None or self.left or self.right:
                raise ValueError("leaf spans carry no children")
            if self.avail_slot < 2:
                raise ValueError("a leaf needs one slot for entangling first")
        else:
            if self.split is None or self.left is None or self.right is None:
                raise ValueError("internal spans need a split and two children")
            if not (self.i < self.split < self.j):
                raise ValueError(f"split {self.split} outside span ({self.i}, {self.j})")
            if (self.left.i, self.left.j) != (self.i, self.split):
                raise ValueError("left child span mismatch")
            if (self.right.i, self.right.j) != (self.split, self.j):
                raise ValueError("right child span mismatch")
            if max(self.left.avail_slot, self.right.avail_slot) > self.avail_slot - 1:
                raise ValueError("children must exist before the swap slot")


def min_root_slot(hops: int) -> int:
    """Earliest slot at which an ``hops``-hop pair can exist."""
    if hops < 1:
        raise ValueError("need at least one hop")
    return 2 + math.ceil(math.log2(hops)) if hops > 1 else 2


class Numerology:
    """Memory footprint of one strategy tree.

    ``pairs`` is the canonically sorted tuple of ``(i, j, slots)`` entries,
    one per tree pair, with the leaf entangling slot merged into the leaf's
    own occupancy.  ``theta`` maps ``(slot, position) -> units in {1, 2}``.
    """

    __slots__ = ("n", "pairs", "theta", "root_slot")

    def __init__(self, n: int, pairs: Iterable[tuple[int, int, tuple[int, ...]]]):
        self.n = n
        self.pairs = tuple(sorted((i, j, tuple(sorted(slots))) for i, j, slots in pairs))
        theta: dict[tuple[int, int], int] = {}
        for i, j, slots in self.pairs:
            for t in slots:
                for pos in (i, j):
                    theta[(t, pos)] = theta.get((t, pos), 0) + 1
        if any(u > 2 for u in theta.values()):
            raise MalformedNumerologyError("more than two units on one node in one slot")
        self.theta = theta
        self.root_slot = max(max(slots) for _, _, slots in self.pairs)

    @property
    def key(self) -> tuple:
        return self.pairs

    def __eq__(self, other):
        return isinstance(other, Numerology) and self.n == other.n and self.pairs == other.pairs

    def __hash__(self):
        return hash((self.n, self.pairs))

    def __repr__(self):
        return f"Numerology(n={self.n}, root_slot={self.root_slot}, pairs={len(self.pairs)})"

    def theta_items(self):
        return self.theta.items()

    def fits(self, caps: Callable[[int, int], int]) -> bool:
        """True when theta stays within ``caps(slot, position)`` everywhere."""
        return all(units <= caps(t, pos) for (t, pos), units in self.theta.items())


def tree_to_numerology(tree: TreeNode) -> Numerology:
    """Canonical occupancy of a feasible strategy tree."""
    entries: list[tuple[int, int, tuple[int, ...]]] = []

    def walk(node: TreeNode, consumed_at: Optional[int]):
        if consumed_at is None:
            slots = [node.avail_slot]
        else:
            slots = list(range(node.avail_slot, consumed_at))
        if node.is_leaf:
            slots.append(node.avail_slot - 1)
        else:
            walk(node.left, node.avail_slot)
            walk(node.right, node.avail_slot)
        entries.append((node.i, node.j, tuple(slots)))

    walk(tree, None)
    return Numerology(tree.j, entries)


def _span_demand(open_spans, theta_row):
    """Solve, left to right, which open spans still claim units this slot.

    Open spans tile the path with shared endpoint columns, so once the
    neighbours left of a leaf are resolved, the residual count on the leaf's
    left column decides whether it is still occupied.  Internal spans always
    claim while open.
    """
    active: dict[tuple[int, int], bool] = {}
    remaining = dict(theta_row)
    for span, kind in open_spans:
        if kind == "internal":
            active[span] = True
            for pos in span:
                remaining[pos] = remaining.get(pos, 0) - 1
    for span, kind in sorted(open_spans):
        if kind != "leaf":
            continue
        if remaining.get(span[0], 0) >= 1:
            active[span] = True
            for pos in span:
                remaining[pos] = remaining.get(pos, 0) - 1
        else:
            active[span] = False
    if any(v != 0 for v in remaining.values()):
        raise MalformedNumerologyError(f"occupancy row does not decompose: {remaining}")
    return active


def numerology_to_tree(m: Numerology) -> TreeNode:
    """Reconstruct the unique strategy tree behind a numerology.

    Scans the distribution from the root slot downward: at each slot, the
    single interior position of an open span holding two units marks that
    span's swap, splitting it into two child spans; a leaf span closes when
    its columns stop being occupied.
    """
    n = m.n
    theta = m.theta
    root_slot = m.root_slot
    if theta.get((root_slot, 1), 0) != 1 or theta.get((root_slot, n), 0) != 1:
        raise MalformedNumerologyError("root slot does not hold the end-to-end pair")
    if any(theta.get((root_slot, pos), 0) for pos in range(2, n)):
        raise MalformedNumerologyError("interior nodes occupied at the root slot")
    if n == 1 or root_slot < min_root_slot(n - 1):
        raise MalformedNumerologyError("root slot below the feasible minimum")

    root_kind = "leaf" if n == 2 else "internal"
    open_spans: dict[tuple[int, int], dict] = {
        (1, n): {"kind": root_kind, "consumed_at": root_slot + 1, "avail": root_slot}
    }
    closed: dict[tuple[int, int], dict] = {}

    for t in range(root_slot - 1, 0, -1):
        # Split events: an open internal span whose interior shows 2 units
        # was created at t+1; its children take over from slot t.
        for span in sorted(open_spans):
            info = open_spans[span]
            if info["kind"] != "internal":
                continue
            i, j = span
            hot = [k for k in range(i + 1, j) if theta.get((t, k), 0) == 2]
            if not hot:
                continue
            if len(hot) > 1:
                raise MalformedNumerologyError(f"multiple swap candidates {hot} in span {span}")
            k = hot[0]
            info["avail"] = t + 1
            info["split"] = k
            closed[span] = info
            del open_spans[span]
            for child in ((i, k), (k, j)):
                kind = "leaf" if child[1] == child[0] + 1 else "internal"
                open_spans[child] = {"kind": kind, "consumed_at": t + 1, "avail": None}
        # Claim resolution: which open spans still hold memory at t.
        row = {pos: theta.get((t, pos), 0) for pos in range(1, n + 1)}
        listing = [(s, open_spans[s]["kind"]) for s in open_spans]
        active = _span_demand(listing, row)
        for span, is_active in active.items():
            if is_active:
                continue
            info = open_spans[span]
            # last claimed slot was t+1, the entangling slot, so avail = t+2
            info["avail"] = t + 2
            closed[span] = info
            del open_spans[span]

    for span, info in open_spans.items():
        if info["kind"] != "leaf":
            raise MalformedNumerologyError(f"internal span {span} never split")
        info["avail"] = 2  # claimed down to slot 1, its entangling slot
        closed[span] = info

    def build(span: tuple[int, int]) -> TreeNode:
        info = closed.get(span)
        if info is None:
            raise MalformedNumerologyError(f"span {span} missing from decomposition")
        i, j = span
        if info["kind"] == "leaf":
            return TreeNode(i, j, info["avail"])
        k = info["split"]
        return TreeNode(i, j, info["avail"], k, build((i, k)), build((k, j)))

    tree = build((1, n))
    if tree_to_numerology(tree) != m:
        raise MalformedNumerologyError("distribution is not the footprint of any tree")
    return tree


def evaluate_fidelity(tree: TreeNode, edge_fidelities, model: FidelityModel) -> float:
    """Fidelity of the end-to-end pair produced by a strategy tree.

    ``edge_fidelities[i-1]`` is the initial fidelity of the path edge between
    positions ``i`` and ``i+1``.  Idling between a child's availability and
    its swap applies per-slot decay; the swap itself decays both inputs one
    further slot before mixing them.
    """

    def value(node: TreeNode) -> float:
        if node.is_leaf:
            return edge_fidelities[node.i - 1]
        f1 = value(node.left)
        f2 = value(node.right)
        swap_slot = node.avail_slot - 1
        for _ in range(swap_slot - node.left.avail_slot):
            f1 = decay_one_slot(model, f1)
        for _ in range(swap_slot - node.right.avail_slot):
            f2 = decay_one_slot(model, f2)
        return swap_with_decay(model, f1, f2)

    return value(tree)


def resource_cost(m: Numerology, weights: Mapping[tuple[int, int], float]) -> float:
    """Sum of ``weights[(slot, position)] * theta`` over occupied cells."""
    return sum(weights.get(cell, 0.0) * units for cell, units in m.theta.items())


def enumerate_numerologies(
    path_len: int,
    num_slots: int,
    caps: Callable[[int, int], int],
    max_hops: int = 8,
    max_trees: int = 500_000,
) -> list[tuple[TreeNode, Numerology]]:
    """Every capacity-feasible (tree, numerology) pair for one path.

    Brute-force oracle for desk-scale checks only; the guard rejects inputs
    whose tree space could blow up.  ``caps(slot, position)`` returns the
    memory available to this request.
    """
    hops = path_len - 1
    if hops < 1:
        raise ValueError("path needs at least one edge")
    if hops > max_hops or num_slots > 8:
        raise EnumerationGuardError(f"enumeration guard: hops={hops}, slots={num_slots}")

    counter = [0]

    def subtrees(i: int, j: int, t_max: int) -> list[TreeNode]:
        """All subtrees over span (i, j) with avail slot <= t_max."""
        if t_max < min_root_slot(j - i):
            return []
        out = []
        if j == i + 1:
            for t in range(2, t_max + 1):
                out.append(TreeNode(i, j, t))
            return out
        for t in range(min_root_slot(j - i), t_max + 1):
            for k in range(i + 1, j):
                for left in subtrees(i, k, t - 1):
                    for right in subtrees(k, j, t - 1):
                        counter[0] += 1
                        if counter[0] > max_trees:
                            raise EnumerationGuardError("enumeration guard: tree count")
                        out.append(TreeNode(i, j, t, k, left, right))
        return out

    seen: dict[tuple, tuple[TreeNode, Numerology]] = {}
    for tree in subtrees(1, path_len, num_slots):
        m = tree_to_numerology(tree)
        if not m.fits(caps):
            continue
        seen.setdefault(m.key, (tree, m))
    return [seen[k] for k in sorted(seen)]


def mirror_tree(tree: TreeNode) -> TreeNode:
    """Reflect a tree across the path midpoint (test helper)."""
    n = tree.j

    def flip(node: TreeNode) -> TreeNode:
        if node.is_leaf:
            return TreeNode(n + 1 - node.j, n + 1 - node.i, node.avail_slot)
        return TreeNode(
            n + 1 - node.j,
            n + 1 - node.i,
            node.avail_slot,
            n + 1 - node.split,
            flip(node.right),
            flip(node.left),
        )

    return flip(tree)


def tree_debug_str(tree: TreeNode) -> str:
    """Indented one-pair-per-line rendering, for golden tests."""
    lines: list[str] = []

    def walk(node: TreeNode, depth: int):
        lines.append("  " * depth + f"{node.i}-{node.j}@{node.avail_slot}")
        if not node.is_leaf:
            walk(node.left, depth + 1)
            walk(node.right, depth + 1)

    walk(tree, 0)
    return "\n".join(lines)
