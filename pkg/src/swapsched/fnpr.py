"""Fractional packing solve, randomized rounding, and two-phase repair.

The fractional phase runs a multiplicative-weights packing loop: dual
weights start at ``delta`` (scaled by capacity), every step picks the
globally most violated column via the min-weight DP oracle, bumps the duals
of the touched constraints, and stops once the dual objective reaches one;
dividing the accumulated primal by ``log_{1+eps}((1+eps)/delta)`` makes it
feasible.  A lazy heap keeps the sweep exact: dual weights only grow, so a
stale oracle value is a lower bound and a fresh heap minimum is the true
minimum.

The raw loop lands a ``(1 - 2 eps)`` factor short of the LP optimum, which
would break the documented dominance of the fractional objective over any
integral plan, so the column pool is re-solved exactly as a restricted LP
(HiGHS) and re-certified against the oracle until no priced-out column
remains.  Rounding draws one uniform per request over its column masses;
repair first evicts from overloaded cells in ascending expected fidelity,
then refills residual capacity in descending fractional mass.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from swapsched.allocation import Allocation, Assigned
from swapsched.dp import min_weight_numerology
from swapsched.instance import Instance, substream
from swapsched.strategy import Numerology, TreeNode, evaluate_fidelity

__all__ = [
    "FracColumn",
    "FractionalSolution",
    "SolverDivergenceError",
    "solve_fractional",
    "randomized_round",
    "repair",
    "fnpr_solve",
]


class SolverDivergenceError(RuntimeError):
    """The packing loop exceeded its iteration cap."""


@dataclass(frozen=True)
class FracColumn:
    request_id: int
    path_idx: int
    key: tuple
    tree: TreeNode
    numerology: Numerology
    cells: tuple  # ((slot, node), units)
    prob: float
    fidelity: float
    value: float = 0.0

    def with_value(self, value: float) -> "FracColumn":
        return FracColumn(
            self.request_id, self.path_idx, self.key, self.tree, self.numerology,
            self.cells, self.prob, self.fidelity, value,
        )


@dataclass
class FractionalSolution:
    columns: list[FracColumn] = field(default_factory=list)
    objective: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    def per_request(self) -> dict[int, list[FracColumn]]:
        out: dict[int, list[FracColumn]] = {}
        for col in self.columns:
            out.setdefault(col.request_id, []).append(col)
        return out


class _PathState:
    __slots__ = ("req_id", "path_idx", "path", "nodes", "n", "prob", "cap_rows", "edge_f",
                 "last_eval", "cost", "tree", "numerology")

    def __init__(self, req_id, path_idx, path, cap_rows, edge_f):
        self.req_id = req_id
        self.path_idx = path_idx
        self.path = path
        self.nodes = path.nodes
        self.n = len(path.nodes)
        self.prob = path.success_prob
        self.cap_rows = cap_rows
        self.edge_f = edge_f
        self.last_eval = -1


def _column_from(state: _PathState, tree, m, instance) -> FracColumn:
    nodes = state.nodes
    cells = tuple(((t, nodes[pos - 1]), units) for (t, pos), units in sorted(m.theta_items()))
    fid = evaluate_fidelity(tree, state.edge_f, instance.model)
    return FracColumn(state.req_id, state.path_idx, (state.req_id, state.path_idx, m.key),
                      tree, m, cells, state.prob, fid)


def _restricted_lp(pool: dict, req_ids, cap) -> Optional[dict]:
    """Exact solve of the packing LP over the pooled columns."""
    cols = [pool[k] for k in sorted(pool)]
    if not cols:
        return {"x": {}, "objective": 0.0, "req_duals": {}, "cell_duals": {}, "cols": []}
    req_rows = {rid: i for i, rid in enumerate(sorted({c.request_id for c in cols}))}
    cell_set = sorted({cell for c in cols for cell, _ in c.cells})
    cell_rows = {cell: len(req_rows) + i for i, cell in enumerate(cell_set)}
    n_rows = len(req_rows) + len(cell_rows)
    a_ub = np.zeros((n_rows, len(cols)))
    b_ub = np.zeros(n_rows)
    for rid, row in req_rows.items():
        b_ub[row] = 1.0
    for cell, row in cell_rows.items():
        b_ub[row] = float(cap[cell[0]][cell[1]])
    for j, col in enumerate(cols):
        a_ub[req_rows[col.request_id], j] = 1.0
        for cell, units in col.cells:
            a_ub[cell_rows[cell], j] = float(units)
    res = linprog(
        c=[-c.prob for c in cols], A_ub=a_ub, b_ub=b_ub, bounds=(0, None), method="highs"
    )
    if not res.success:
        return None
    duals = -np.asarray(res.ineqlin.marginals)
    return {
        "x": {col.key: float(res.x[j]) for j, col in enumerate(cols)},
        "objective": float(-res.fun),
        "req_duals": {rid: float(duals[row]) for rid, row in req_rows.items()},
        "cell_duals": {cell: float(duals[row]) for cell, row in cell_rows.items()},
        "cols": cols,
    }


def solve_fractional(
    instance: Instance,
    epsilon: float = 0.1,
    iteration_cap: Optional[int] = None,
    max_cert_rounds: int = 30,
) -> FractionalSolution:
    """Near-optimal fractional selection of (path, numerology) columns.

    Satisfies the one-per-request and memory constraints exactly; the
    objective is at least ``(1 - 2 eps)`` of the packing optimum by the
    multiplicative-weights guarantee and in practice matches the LP optimum
    after the restricted re-solve.
    """
    if not 0.0 < epsilon <= 0.5:
        raise ValueError("epsilon must lie in (0, 0.5]")
    topo = instance.topology
    cap = topo.capacity
    num_slots = instance.num_slots
    num_nodes = topo.num_nodes
    req_ids = [r.id for r in instance.requests]
    eta1 = num_nodes * num_slots + len(req_ids)
    if iteration_cap is None:
        iteration_cap = int(10 * eta1 * math.log(max(eta1, 2)) / (epsilon * epsilon))
    delta = (1 + epsilon) * ((1 + epsilon) * eta1) ** (-1.0 / epsilon)

    states: list[_PathState] = []
    for req in instance.requests:
        for p_idx, path in enumerate(req.paths):
            if path.success_prob <= 0.0:
                continue
            st = _PathState(req.id, p_idx, path, instance.path_caps(path),
                            instance.path_edge_fidelities(path))
            states.append(st)

    alpha = {rid: delta for rid in req_ids}
    beta = [[0.0] * num_nodes for _ in range(num_slots + 1)]
    dual_obj = len(req_ids) * delta
    for t in range(1, num_slots + 1):
        for v in range(num_nodes):
            c = int(cap[t][v])
            if c > 0:
                beta[t][v] = delta / c
                dual_obj += delta  # c * (delta / c)
            else:
                beta[t][v] = delta

    node_version = [0] * num_nodes
    clock = 0  # monotone event counter ordering oracle runs vs weight bumps
    pool: dict[tuple, FracColumn] = {}
    raw_x: dict[tuple, float] = {}
    oracle_calls = 0
    dual_bound = math.inf

    def run_oracle(st: _PathState):
        nonlocal oracle_calls, clock
        oracle_calls += 1
        clock += 1
        w = [[0.0] * (st.n + 1)]
        for t in range(1, num_slots + 1):
            bt = beta[t]
            w.append([0.0] + [bt[v] for v in st.nodes])
        out = min_weight_numerology(st.n, num_slots, st.cap_rows, w)
        st.last_eval = clock
        if out is None:
            st.cost = None
            return None
        tree, m, cost = out
        st.cost, st.tree, st.numerology = cost, tree, m
        return cost

    heap: list = []
    live_states: dict[tuple[int, int], _PathState] = {}
    for st in states:
        cost = run_oracle(st)
        if cost is None:
            continue  # capacity-infeasible paths never become feasible
        live_states[(st.req_id, st.path_idx)] = st
        heapq.heappush(heap, ((alpha[st.req_id] + cost) / st.prob, st.req_id, st.path_idx, st.last_eval))

    iteration = 0
    while dual_obj < 1.0 and heap:
        iteration += 1
        if iteration > iteration_cap:
            raise SolverDivergenceError(f"packing loop above {iteration_cap} iterations")
        # Pop until the minimum entry is provably fresh.  Stale entries are
        # lower bounds because duals only grow, so a fresh heap minimum is
        # the true most-violated column.
        while True:
            ratio, rid, p_idx, eval_clock = heap[0]
            st = live_states[(rid, p_idx)]
            if eval_clock < st.last_eval:
                heapq.heappop(heap)  # superseded entry
                continue
            stale = any(node_version[v] > eval_clock for v in st.nodes)
            fresh_ratio = (alpha[rid] + st.cost) / st.prob
            if stale or fresh_ratio != ratio:
                heapq.heappop(heap)
                if stale:
                    run_oracle(st)
                heapq.heappush(heap, ((alpha[rid] + st.cost) / st.prob, rid, p_idx, st.last_eval))
                continue
            break
        ratio, rid, p_idx, _ = heap[0]
        st = live_states[(rid, p_idx)]
        if ratio > 0:
            dual_bound = min(dual_bound, dual_obj / ratio)
        col = _column_from(st, st.tree, st.numerology, instance)
        pool.setdefault(col.key, col)
        u = 1.0
        for (t, v), units in col.cells:
            u = min(u, cap[t][v] / units)
        raw_x[col.key] = raw_x.get(col.key, 0.0) + u
        old = alpha[rid]
        alpha[rid] = old * (1 + epsilon * u)
        dual_obj += alpha[rid] - old
        clock += 1
        for (t, v), units in col.cells:
            c = int(cap[t][v])
            old_b = beta[t][v]
            beta[t][v] = old_b * (1 + epsilon * units * u / c)
            dual_obj += c * (beta[t][v] - old_b)
            node_version[v] = clock
        heapq.heappush(heap, ((alpha[rid] + st.cost) / st.prob, rid, p_idx, st.last_eval))

    scale = math.log((1 + epsilon) / delta) / math.log(1 + epsilon)
    gk_x = {key: val / scale for key, val in raw_x.items()}
    gk_objective = sum(pool[key].prob * val for key, val in gk_x.items())

    # harvest one final fresh column per live path so the restricted LP sees
    # every request the oracle can serve
    for st in live_states.values():
        if any(node_version[v] > st.last_eval for v in st.nodes):
            run_oracle(st)
        col = _column_from(st, st.tree, st.numerology, instance)
        pool.setdefault(col.key, col)

    certified = False
    lp = None
    cert_rounds = 0
    for cert_rounds in range(1, max_cert_rounds + 1):
        lp = _restricted_lp(pool, req_ids, cap)
        if lp is None:
            break
        violated = 0
        for st in live_states.values():
            w = [[0.0] * (st.n + 1)]
            for t in range(1, num_slots + 1):
                w.append([0.0] + [lp["cell_duals"].get((t, v), 0.0) for v in st.nodes])
            out = min_weight_numerology(st.n, num_slots, st.cap_rows, w)
            oracle_calls += 1
            if out is None:
                continue
            tree, m, cost = out
            if lp["req_duals"].get(st.req_id, 0.0) + cost < st.prob - 1e-9:
                col = _column_from(st, tree, m, instance)
                if col.key not in pool:
                    pool[col.key] = col
                    violated += 1
        if violated == 0:
            certified = True
            break

    if lp is not None:
        x = lp["x"]
        objective = lp["objective"]
    else:
        x = gk_x
        objective = gk_objective

    columns = [
        pool[key].with_value(val) for key, val in sorted(x.items()) if val > 1e-12
    ]
    sol = FractionalSolution(columns=columns, objective=objective)
    sol.diagnostics = {
        "iterations": iteration,
        "oracle_calls": oracle_calls,
        "pool_size": len(pool),
        "gk_objective": gk_objective,
        "dual_bound": dual_bound,
        "lp_certified": certified,
        "cert_rounds": cert_rounds,
        "epsilon": epsilon,
        "delta": delta,
        "scale": scale,
    }
    return sol


def randomized_round(frac: FractionalSolution, instance: Instance, rng: np.random.Generator) -> Allocation:
    """One uniform draw per request over its cumulative column masses."""
    groups = frac.per_request()
    alloc = Allocation()
    for req in instance.requests:
        cols = groups.get(req.id)
        if not cols:
            continue
        u = rng.random()
        cum = 0.0
        for col in cols:
            cum += col.value
            if u < cum:
                alloc.entries[req.id] = Assigned(
                    req.id, col.path_idx, req.paths[col.path_idx], col.tree,
                    col.numerology, col.prob, col.fidelity,
                )
                break
    return alloc


def repair(tentative: Allocation, frac: FractionalSolution, instance: Instance, mode: str) -> Allocation:
    """Make a rounded plan feasible, then refill residual capacity.

    Phase 0 (threshold mode only) drops sub-threshold picks.  Phase 1
    repeatedly takes the most overloaded (node, slot) cell and evicts its
    occupants in ascending expected fidelity until the cell fits.  Phase 2
    walks the fractional columns in descending mass and serves unserved
    requests that still fit.
    """
    if mode not in ("tetris", "tetris_n"):
        raise ValueError(f"unknown mode {mode!r}")
    cap = instance.topology.capacity
    alloc = Allocation(entries=dict(tentative.entries), diagnostics=dict(tentative.diagnostics))
    alloc.diagnostics["pre_repair_overload"] = tentative.max_overload_factor(instance)

    if mode == "tetris":
        for rid in [r for r, a in alloc.entries.items() if a.fidelity < instance.threshold]:
            del alloc.entries[rid]

    loads = alloc.loads()

    def ev_key(item):
        rid, a = item
        theta_total = sum(units for _, units in a.cells())
        return (a.expected_fidelity, -theta_total, rid)

    while True:
        worst_cell, worst_factor = None, 1.0
        for (t, v), load in loads.items():
            factor = load / cap[t][v]
            if factor > worst_factor + 1e-12 or (
                worst_cell is not None
                and abs(factor - worst_factor) <= 1e-12
                and (t, v) < worst_cell
            ):
                worst_cell, worst_factor = (t, v), factor
        if worst_cell is None:
            break
        occupants = [
            (rid, a)
            for rid, a in alloc.entries.items()
            if any(cell == worst_cell for cell, _ in a.cells())
        ]
        occupants.sort(key=ev_key)
        for rid, a in occupants:
            if loads[worst_cell] <= cap[worst_cell[0]][worst_cell[1]]:
                break
            del alloc.entries[rid]
            for cell, units in a.cells():
                loads[cell] -= units

    # Phase 2: refill with generated columns, best fractional mass first.
    order = sorted(
        frac.columns, key=lambda c: (-c.value, c.request_id, c.path_idx, c.key)
    )
    for col in order:
        if col.request_id in alloc.entries:
            continue
        if mode == "tetris" and col.fidelity < instance.threshold:
            continue
        if all(loads.get(cell, 0) + units <= cap[cell[0]][cell[1]] for cell, units in col.cells):
            req = instance.requests[_request_index(instance, col.request_id)]
            alloc.entries[col.request_id] = Assigned(
                col.request_id, col.path_idx, req.paths[col.path_idx], col.tree,
                col.numerology, col.prob, col.fidelity,
            )
            for cell, units in col.cells:
                loads[cell] = loads.get(cell, 0) + units
    return alloc


def _request_index(instance: Instance, rid: int) -> int:
    for i, req in enumerate(instance.requests):
        if req.id == rid:
            return i
    raise KeyError(rid)


def fnpr_solve(
    instance: Instance,
    mode: Optional[str] = None,
    epsilon: Optional[float] = None,
    rng: Optional[np.random.Generator] = None,
    seed: Optional[int] = None,
) -> Allocation:
    """Full pipeline: fractional solve, randomized rounding, repair."""
    cfg = instance.config
    if mode is None:
        mode = cfg.mode if cfg is not None else "tetris"
    if epsilon is None:
        epsilon = cfg.epsilon if cfg is not None else 0.1
    if rng is None:
        base = seed if seed is not None else (cfg.seed if cfg is not None else 0)
        rng = substream(base, "rounding")
    frac = solve_fractional(instance, epsilon)
    tentative = randomized_round(frac, instance, rng)
    alloc = repair(tentative, frac, instance, mode)
    alloc.diagnostics.update(
        {k: frac.diagnostics[k] for k in ("iterations", "oracle_calls", "lp_certified")}
    )
    alloc.diagnostics["fractional_objective"] = frac.objective
    return alloc
