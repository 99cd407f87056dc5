"""Slot-indexed dynamic programs over one path.

Both recursions walk the same state space g(t, (i, j), (sigma_s, sigma_d)):
the best (sub)tree whose pair spans path positions ``i..j`` and exists at
slot ``t``, under a capacity reservation of ``sigma`` units at each endpoint.
The max-fidelity version maximizes the end-to-end fidelity through per-slot
decay and swap loss; the min-weight version minimizes the weighted memory
footprint and, fed with dual weights, acts as the packing solver's
separation oracle.

States are flattened into per-slot lists and the split transitions are
precompiled into index programs per path length (hot loop of the packing
solver).  A reservation of two units at an endpoint is only reachable where
that endpoint is an ancestor's split node, so sigma_s=2 states exist only
for i > 1 and sigma_d=2 only for j < n.  The split transition tries both
ways of charging the shared node with two units, which covers the true
occupancy because both children's intervals there end at the parent's slot.
"""

from __future__ import annotations

from typing import Optional

from swapsched.fidelity import FidelityModel, decay_one_slot, swap_fidelity
from swapsched.strategy import Numerology, TreeNode, min_root_slot, tree_to_numerology

__all__ = ["max_fidelity_numerology", "min_weight_numerology", "cost_of"]

NEG = float("-inf")
POS = float("inf")

_LEAF = 1
_IDLE = 2

# sig encodes (sigma_s - 1) * 2 + (sigma_d - 1)
_PROGRAMS: dict[int, list] = {}


def _program(n: int) -> list:
    """Per-span transition tables: flat state indices and split codes."""
    prog = _PROGRAMS.get(n)
    if prog is not None:
        return prog
    w = n + 1
    prog = []
    for length in range(1, n):
        for i in range(1, n - length + 1):
            j = i + length
            base = (i * w + j) * 4
            sigs = [0]
            if j < n:
                sigs.append(1)
            if i > 1:
                sigs.append(2)
            if i > 1 and j < n:
                sigs.append(3)
            entries = []
            for sig in sigs:
                ss = 1 + (sig >> 1)
                sd = 1 + (sig & 1)
                klist = []
                for k in range(i + 1, j):
                    lbase = (i * w + k) * 4
                    rbase = (k * w + j) * 4
                    klist.append(
                        (
                            lbase + (sig >> 1) * 2 + 1,
                            rbase + (sig & 1),
                            lbase + (sig >> 1) * 2,
                            rbase + 2 + (sig & 1),
                            3 + (k << 1),
                            4 + (k << 1),
                        )
                    )
                entries.append((base + sig, ss, sd, tuple(klist)))
            prog.append((i, j, j == i + 1, tuple(entries)))
    prog = tuple(prog)
    _PROGRAMS[n] = prog
    return prog


def _extract(n: int, choices, t: int, i: int, j: int, sig: int) -> TreeNode:
    """Walk the recorded choices down from one state, unwinding idle steps."""
    w = n + 1
    while True:
        code = choices[t][(i * w + j) * 4 + sig]
        if code == _IDLE:
            t -= 1
            continue
        if code == _LEAF:
            return TreeNode(i, j, t)
        k = (code - 3) >> 1
        if (code - 3) & 1:
            sig_l = (sig >> 1) * 2  # left child unrestricted at k
            sig_r = 2 + (sig & 1)
        else:
            sig_l = (sig >> 1) * 2 + 1  # left child charged two units at k
            sig_r = sig & 1
        return TreeNode(
            i, j, t, k, _extract(n, choices, t - 1, i, k, sig_l), _extract(n, choices, t - 1, k, j, sig_r)
        )


def cost_of(m: Numerology, weights) -> float:
    """Canonical weighted footprint, ``weights[t][pos]`` indexed by cell."""
    total = 0.0
    for (t, pos), units in m.theta_items():
        total += weights[t][pos] * units
    return total


def min_weight_numerology(
    n: int, num_slots: int, cap, weights
) -> Optional[tuple[TreeNode, Numerology, float]]:
    """Cheapest feasible numerology for an ``n``-position path.

    ``cap[t][pos]`` and ``weights[t][pos]`` are indexed by slot 1..num_slots
    and position 1..n (row and column 0 unused).  Returns the argmin tree,
    its numerology, and its cost recomputed canonically from the footprint,
    or None when no tree fits.  Ties prefer the earliest root slot, then
    idling over splitting, then the smaller split index.
    """
    if n < 2 or num_slots < min_root_slot(n - 1):
        return None
    w = n + 1
    size = w * w * 4
    prog = _program(n)
    prev = [POS] * size
    choices: list = [None, [0] * size]
    root_idx = (w + n) * 4
    best_t, best_v = 0, POS
    for t in range(2, num_slots + 1):
        cur = [POS] * size
        cho = [0] * size
        wt, wt1, ct, ct1 = weights[t], weights[t - 1], cap[t], cap[t - 1]
        for i, j, adjacent, entries in prog:
            ci = ct[i]
            cj = ct[j]
            for idx, ss, sd, klist in entries:
                if ci < ss or cj < sd:
                    continue
                if adjacent and ct1[i] >= ss and ct1[j] >= sd:
                    cur[idx] = wt[i] + wt[j] + wt1[i] + wt1[j]
                    cho[idx] = _LEAF
                    continue
                best = prev[idx]
                code = _IDLE
                for l0, r0, l1, r1, c0, c1 in klist:
                    v = prev[l0] + prev[r0]
                    if v < best:
                        best = v
                        code = c0
                    v = prev[l1] + prev[r1]
                    if v < best:
                        best = v
                        code = c1
                if best < POS:
                    cur[idx] = wt[i] + wt[j] + best
                    cho[idx] = code
        choices.append(cho)
        prev = cur
        v = cur[root_idx]
        if v < best_v:
            best_v, best_t = v, t
    if best_v == POS:
        return None
    tree = _extract(n, choices, best_t, 1, n, 0)
    m = tree_to_numerology(tree)
    return tree, m, cost_of(m, weights)


def max_fidelity_numerology(
    n: int,
    num_slots: int,
    cap,
    edge_fidelities,
    model: FidelityModel,
    threshold: float = 0.0,
) -> Optional[tuple[TreeNode, Numerology, float]]:
    """Highest-fidelity feasible numerology, or None if none reaches
    ``threshold``.  Arguments as in min_weight_numerology, plus the initial
    fidelity of each path edge.  Ties prefer the latest root slot (fresher
    pairs), then idling over splitting, then the smaller split index.
    """
    if n < 2 or num_slots < min_root_slot(n - 1):
        return None
    w = n + 1
    size = w * w * 4
    prog = _program(n)

    decay_cache: dict[float, float] = {}

    def dec(f: float) -> float:
        v = decay_cache.get(f)
        if v is None:
            v = decay_one_slot(model, f) if f > model.a + 1e-12 else NEG
            decay_cache[f] = v
        return v

    prev = [NEG] * size
    choices: list = [None, [0] * size]
    root_idx = (w + n) * 4
    best_t, best_v = 0, NEG
    for t in range(2, num_slots + 1):
        cur = [NEG] * size
        cho = [0] * size
        ct, ct1 = cap[t], cap[t - 1]
        for i, j, adjacent, entries in prog:
            ci = ct[i]
            cj = ct[j]
            for idx, ss, sd, klist in entries:
                if ci < ss or cj < sd:
                    continue
                if adjacent and ct1[i] >= ss and ct1[j] >= sd:
                    cur[idx] = edge_fidelities[i - 1]
                    cho[idx] = _LEAF
                    continue
                idle = prev[idx]
                best = dec(idle) if idle > NEG else NEG
                code = _IDLE
                for l0, r0, l1, r1, c0, c1 in klist:
                    fl = prev[l0]
                    fr = prev[r0]
                    if fl > NEG and fr > NEG:
                        v = swap_fidelity(dec(fl), dec(fr))
                        if v > best:
                            best = v
                            code = c0
                    fl = prev[l1]
                    fr = prev[r1]
                    if fl > NEG and fr > NEG:
                        v = swap_fidelity(dec(fl), dec(fr))
                        if v > best:
                            best = v
                            code = c1
                if best > NEG:
                    cur[idx] = best
                    cho[idx] = code
        choices.append(cho)
        prev = cur
        v = cur[root_idx]
        if v > NEG and v >= best_v:  # later root slot wins ties
            best_v, best_t = v, t
    if best_t == 0 or best_v < threshold:
        return None
    tree = _extract(n, choices, best_t, 1, n, 0)
    return tree, tree_to_numerology(tree), best_v
