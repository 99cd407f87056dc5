"""Comparison policies: balanced nesting, left-to-right linear, ASAP, UB.

Nesting and linear are plan-based: they fix one tree shape per request on
its most reliable path and accept it when it fits the residual memory and
reaches the fidelity threshold.  ASAP is adaptive and therefore evaluated
by Monte Carlo: admitted requests bind a full-path reservation and react to
entangling/swap outcomes slot by slot.  UB reports the fractional packing
objective as an optimum upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from swapsched.allocation import Allocation, Assigned
from swapsched.fidelity import decay_one_slot, swap_with_decay
from swapsched.fnpr import solve_fractional
from swapsched.instance import Instance, Path
from swapsched.strategy import TreeNode, evaluate_fidelity, tree_to_numerology

__all__ = [
    "nesting_tree",
    "linear_tree",
    "nesting_plan",
    "linear_plan",
    "asap_monte_carlo",
    "upper_bound",
    "McOutcome",
]


def nesting_tree(hops: int) -> TreeNode:
    """All links at slot 2, then every slot swaps disjoint adjacent segments
    left to right, carrying a leftover segment; complete shape for powers of
    two."""
    segments = [TreeNode(i, i + 1, 2) for i in range(1, hops + 1)]
    slot = 2
    while len(segments) > 1:
        merged = []
        idx = 0
        while idx + 1 < len(segments):
            left, right = segments[idx], segments[idx + 1]
            merged.append(TreeNode(left.i, right.j, slot + 1, left.j, left, right))
            idx += 2
        if idx < len(segments):
            merged.append(segments[idx])  # carried segment idles this slot
        segments = merged
        slot += 1
    return segments[0]


def linear_tree(hops: int) -> TreeNode:
    """All links at slot 2, then one swap per slot from source to
    destination; fully skewed shape with root slot 2 + (hops - 1)."""
    acc = TreeNode(1, 2, 2)
    for edge in range(2, hops + 1):
        acc = TreeNode(1, edge + 1, acc.avail_slot + 1, edge, acc, TreeNode(edge, edge + 1, 2))
    return acc


def _best_path(req) -> tuple[int, Path] | None:
    if not req.paths:
        return None
    best = max(range(len(req.paths)), key=lambda i: (req.paths[i].success_prob, -i))
    return best, req.paths[best]


def _plan(instance: Instance, shape) -> Allocation:
    residual = instance.topology.capacity.copy()
    alloc = Allocation()
    for req in instance.requests:
        picked = _best_path(req)
        if picked is None:
            continue
        p_idx, path = picked
        tree = shape(path.hops)
        if tree.avail_slot > instance.num_slots:
            continue
        m = tree_to_numerology(tree)
        nodes = path.nodes
        cells = [((t, nodes[pos - 1]), units) for (t, pos), units in m.theta_items()]
        if any(residual[t][v] < units for (t, v), units in cells):
            continue
        fid = evaluate_fidelity(tree, instance.path_edge_fidelities(path), instance.model)
        if fid < instance.threshold:
            continue
        for (t, v), units in cells:
            residual[t][v] -= units
        alloc.entries[req.id] = Assigned(req.id, p_idx, path, tree, m, path.success_prob, fid)
    return alloc


def nesting_plan(instance: Instance) -> Allocation:
    return _plan(instance, nesting_tree)


def linear_plan(instance: Instance) -> Allocation:
    return _plan(instance, linear_tree)


@dataclass(frozen=True)
class McOutcome:
    trials: int
    acceptance_rate: float
    mean_fidelity_sum: float
    stderr_fidelity_sum: float


def _admit_asap(instance: Instance):
    """Greedy admission binding 1 unit at endpoints and 2 at interiors for
    the whole batch."""
    residual = instance.topology.capacity.copy()
    admitted = []
    for req in instance.requests:
        picked = _best_path(req)
        if picked is None:
            continue
        _, path = picked
        nodes = path.nodes
        need = {v: 2 for v in nodes[1:-1]}
        need[nodes[0]] = 1
        need[nodes[-1]] = 1
        if all(
            residual[t][v] >= units for v, units in need.items() for t in range(1, instance.num_slots + 1)
        ):
            for v, units in need.items():
                residual[1:, v] -= units
            admitted.append((req, path))
    return admitted


def _asap_trial(instance: Instance, path: Path, rng, swap_failure: str = "destroy") -> float:
    """One adaptive run for one request; returns achieved end-to-end
    fidelity, or 0.0 on failure within the batch.

    ``swap_failure`` picks the retry semantics on a failed swap: "destroy"
    consumes both input pairs (their links re-entangle from scratch),
    "keep" leaves the decayed pairs in memory for another attempt.
    """
    topo = instance.topology
    model = instance.model
    n = len(path.nodes)
    num_slots = instance.num_slots
    link_probs = [topo.edge(path.nodes[a], path.nodes[a + 1]).link_prob for a in range(n - 1)]
    init_f = instance.path_edge_fidelities(path)
    swap_probs = [topo.swap_prob(v) for v in path.nodes]
    pairs: list[list] = []  # [i, j, fidelity], positions 1-based

    for t in range(1, num_slots + 1):
        covered = [False] * n  # edge e covered when some pair spans it
        for i, j, _ in pairs:
            for e in range(i, j):
                covered[e] = True
        # entangling attempts for uncovered links finish at t + 1
        incoming = []
        if t < num_slots:
            for e in range(1, n):
                if not covered[e] and rng.random() < link_probs[e - 1]:
                    incoming.append([e, e + 1, init_f[e - 1]])
        # swaps at slot end: left-greedy disjoint matching of adjacent pairs
        pairs.sort()
        used = [False] * len(pairs)
        new_pairs = []
        for a in range(len(pairs)):
            if used[a]:
                continue
            b = None
            for c in range(a + 1, len(pairs)):
                if not used[c] and pairs[c][0] == pairs[a][1]:
                    b = c
                    break
            if b is None or t >= num_slots:
                continue
            used[a] = used[b] = True
            if rng.random() < swap_probs[pairs[a][1] - 1]:
                fused = swap_with_decay(model, pairs[a][2], pairs[b][2])
                new_pairs.append([pairs[a][0], pairs[b][1], fused])
            elif swap_failure == "keep":
                new_pairs.append([pairs[a][0], pairs[a][1], decay_one_slot(model, pairs[a][2])])
                new_pairs.append([pairs[b][0], pairs[b][1], decay_one_slot(model, pairs[b][2])])
        survivors = []
        for a in range(len(pairs)):
            if not used[a]:
                p = pairs[a]
                survivors.append([p[0], p[1], decay_one_slot(model, p[2])])
        pairs = survivors + new_pairs + incoming
        for i, j, f in pairs:
            if i == 1 and j == n and t + 1 <= num_slots and f >= instance.threshold:
                return f
    return 0.0


def asap_monte_carlo(
    instance: Instance, trials: int, rng: np.random.Generator, swap_failure: str = "destroy"
) -> McOutcome:
    """Adaptive swap-as-soon-as-possible policy, averaged over trials."""
    if trials < 1:
        raise ValueError("need at least one trial")
    admitted = _admit_asap(instance)
    total_requests = max(len(instance.requests), 1)
    sums = []
    successes = 0
    for _ in range(trials):
        s = 0.0
        for req, path in admitted:
            f = _asap_trial(instance, path, rng, swap_failure)
            if f > 0.0:
                successes += 1
                s += f
        sums.append(s)
    mean = float(np.mean(sums))
    stderr = float(np.std(sums, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    rate = successes / (trials * total_requests)
    return McOutcome(trials, rate, mean, stderr)


def upper_bound(instance: Instance, epsilon: float = 0.1) -> float:
    """Fractional packing objective; upper-bounds any feasible plan's
    fidelity-free objective."""
    return solve_fractional(instance, epsilon).objective
