"""Experiment drivers: single scenarios, sweeps, ratio/kappa studies,
Monte-Carlo plan verification, and the self-check suite."""

from __future__ import annotations

import hashlib
import itertools
import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from swapsched.allocation import Allocation
from swapsched.base import SOLVER_NAMES, make_solver
from swapsched.bruteforce import ilp_optimum, mis_size
from swapsched.fidelity import FidelityModel
from swapsched.instance import Instance, ScenarioConfig, build_instance, mis_reduction, substream
from swapsched.strategy import (
    TreeNode,
    enumerate_numerologies,
    evaluate_fidelity,
    numerology_to_tree,
)

__all__ = [
    "MetricsRow",
    "SummaryRow",
    "SweepSpec",
    "scenario_id_of",
    "run_scenario",
    "sweep",
    "summarize",
    "fig3_ratio_experiment",
    "kappa_experiment",
    "skewed_reference_tree",
    "complete_reference_tree",
    "mc_verify",
    "McVerifyReport",
    "validate",
]


@dataclass(frozen=True)
class MetricsRow:
    scenario_id: str
    seed: int
    algorithm: str
    param_name: str
    param_value: str
    expected_fidelity_sum: float
    accepted_requests: float
    pre_repair_overload: Optional[float]
    runtime_ms: float


@dataclass(frozen=True)
class SummaryRow:
    param_name: str
    param_value: str
    algorithm: str
    n: int
    mean_expected_fidelity_sum: float
    se_expected_fidelity_sum: float
    mean_accepted_requests: float
    se_accepted_requests: float


@dataclass(frozen=True)
class SweepSpec:
    base: ScenarioConfig
    param: str
    values: tuple
    seeds_per_point: int = 20
    algorithms: tuple = ("fnpr", "flto")

    def __post_init__(self):
        if self.param != "memory" and self.param not in ScenarioConfig.__dataclass_fields__:
            raise ValueError(f"unknown swept parameter {self.param!r}")


def scenario_id_of(config: ScenarioConfig) -> str:
    text = repr(sorted(config.__dict__.items())).encode()
    return "sc-" + hashlib.sha256(text).hexdigest()[:10]


def run_scenario(config: ScenarioConfig, algorithms, instance: Optional[Instance] = None,
                 param_name: str = "", param_value: str = "") -> list[MetricsRow]:
    """Build the instance and run each named algorithm on it."""
    for name in algorithms:
        if name not in SOLVER_NAMES:
            raise ValueError(f"unknown algorithm {name!r}")
    if instance is None:
        instance = build_instance(config)
    sid = scenario_id_of(config)
    rows = []
    for name in algorithms:
        solver = make_solver(name, config)
        t0 = time.perf_counter()
        solver.fit(instance)
        runtime_ms = (time.perf_counter() - t0) * 1e3
        rows.append(
            MetricsRow(
                sid, config.seed, name, param_name, param_value,
                solver.expected_fidelity_sum_, solver.accepted_requests_,
                getattr(solver, "pre_repair_overload_", None), runtime_ms,
            )
        )
    return rows


def _apply_param(base: ScenarioConfig, param: str, value):
    if param == "memory":
        return base.with_(mem_min=int(value), mem_max=int(value))
    current = getattr(base, param)
    if isinstance(current, int) and not isinstance(current, bool):
        return base.with_(**{param: int(value)})
    if isinstance(current, float):
        return base.with_(**{param: float(value)})
    return base.with_(**{param: value})


def sweep(spec: SweepSpec) -> tuple[list[MetricsRow], list[SummaryRow]]:
    """Cross product of swept values and derived per-point seeds."""
    rows: list[MetricsRow] = []
    for v_idx, value in enumerate(spec.values):
        for rep in range(spec.seeds_per_point):
            rng = substream(spec.base.seed, "sweep", v_idx, rep)
            seed = int(rng.integers(0, 2**62))
            config = _apply_param(spec.base, spec.param, value).with_(seed=seed)
            rows.extend(
                run_scenario(config, spec.algorithms, param_name=spec.param, param_value=str(value))
            )
    return rows, summarize(rows)


def summarize(rows) -> list[SummaryRow]:
    """Per (param value, algorithm) means with standard errors."""
    groups: dict[tuple, list[MetricsRow]] = {}
    order: list[tuple] = []
    for row in rows:
        key = (row.param_name, row.param_value, row.algorithm)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)

    def mean_se(values):
        n = len(values)
        mean = sum(values) / n
        if n > 1:
            var = sum((v - mean) ** 2 for v in values) / (n - 1)
            return mean, math.sqrt(var / n)
        return mean, 0.0

    out = []
    for key in order:
        fid_mean, fid_se = mean_se([r.expected_fidelity_sum for r in groups[key]])
        acc_mean, acc_se = mean_se([r.accepted_requests for r in groups[key]])
        out.append(SummaryRow(key[0], key[1], key[2], len(groups[key]), fid_mean, fid_se, acc_mean, acc_se))
    return out


@dataclass(frozen=True)
class RatioRow:
    tau_ms: float
    num_slots: int
    seed: int
    request_id: int
    path_idx: int
    path_hops: int
    ratio: float


def fig3_ratio_experiment(
    base: ScenarioConfig, taus, slot_counts, seeds, max_hops: int = 5
) -> list[RatioRow]:
    """Max/min achievable fidelity over all feasible schedules per path.

    Paths above ``max_hops`` are skipped (enumeration guard); each cell of
    the (tau, num_slots) grid reuses the same seeds so cells are comparable.
    """
    rows: list[RatioRow] = []
    for tau, num_slots, seed in itertools.product(taus, slot_counts, seeds):
        config = base.with_(slot_ms=float(tau), num_slots=int(num_slots), seed=int(seed))
        instance = build_instance(config)
        cap = instance.topology.capacity
        for req in instance.requests:
            for p_idx, path in enumerate(req.paths):
                if path.hops > max_hops:
                    continue
                nodes = path.nodes
                edge_f = instance.path_edge_fidelities(path)
                pairs = enumerate_numerologies(
                    len(nodes), instance.num_slots, lambda t, pos: int(cap[t][nodes[pos - 1]])
                )
                if not pairs:
                    continue
                fids = [evaluate_fidelity(tree, edge_f, instance.model) for tree, _ in pairs]
                rows.append(
                    RatioRow(
                        float(tau), int(num_slots), int(seed), req.id, p_idx, path.hops,
                        max(fids) / min(fids),
                    )
                )
    return rows


def skewed_reference_tree() -> TreeNode:
    """Four-hop just-in-time chain: every link entangles right before its
    swap, so each swap mixes near-equal fidelities."""
    n13 = TreeNode(1, 3, 3, 2, TreeNode(1, 2, 2), TreeNode(2, 3, 2))
    n14 = TreeNode(1, 4, 4, 3, n13, TreeNode(3, 4, 3))
    return TreeNode(1, 5, 5, 4, n14, TreeNode(4, 5, 4))


def complete_reference_tree() -> TreeNode:
    n13 = TreeNode(1, 3, 3, 2, TreeNode(1, 2, 2), TreeNode(2, 3, 2))
    n35 = TreeNode(3, 5, 3, 4, TreeNode(3, 4, 2), TreeNode(4, 5, 2))
    return TreeNode(1, 5, 4, 3, n13, n35)


HETEROGENEOUS_FIDELITIES = (0.98, 0.98, 0.95, 0.90)
HOMOGENEOUS_FIDELITIES = (0.98, 0.98, 0.98, 0.98)


@dataclass(frozen=True)
class KappaRow:
    kappa: float
    fidelity_set: str
    shape: str
    fidelity: float


def kappa_experiment(kappas, tau_ms: float = 2.0) -> list[KappaRow]:
    """Skewed vs complete four-hop tree fidelity across decoherence shapes."""
    rows = []
    for kappa in kappas:
        model = FidelityModel(kappa=float(kappa), tau_ms=tau_ms)
        for set_name, fids in (
            ("heterogeneous", HETEROGENEOUS_FIDELITIES),
            ("homogeneous", HOMOGENEOUS_FIDELITIES),
        ):
            for shape_name, tree in (
                ("skewed", skewed_reference_tree()),
                ("complete", complete_reference_tree()),
            ):
                rows.append(
                    KappaRow(float(kappa), set_name, shape_name, evaluate_fidelity(tree, list(fids), model))
                )
    return rows


@dataclass(frozen=True)
class McVerifyReport:
    trials: int
    expected: float
    empirical_mean: float
    stderr: float
    within_three_sigma: bool


def mc_verify(alloc: Allocation, instance: Instance, trials: int, rng: np.random.Generator) -> McVerifyReport:
    """Monte Carlo the fixed plan: each link succeeds with its entangling
    probability and each interior node's swap with its swap probability; any
    failure voids the request.  Checks the empirical fidelity sum against
    the plan's expected value."""
    topo = instance.topology
    plans = []
    for rid in sorted(alloc.entries):
        a = alloc.entries[rid]
        nodes = a.path.nodes
        probs = [topo.edge(nodes[i], nodes[i + 1]).link_prob for i in range(len(nodes) - 1)]
        probs += [topo.swap_prob(v) for v in nodes[1:-1]]
        plans.append((probs, a.fidelity))
    sums = np.zeros(trials)
    for trial in range(trials):
        total = 0.0
        for probs, fid in plans:
            if all(rng.random() < p for p in probs):
                total += fid
        sums[trial] = total
    expected = sum(a.expected_fidelity for a in alloc.entries.values())
    mean = float(sums.mean()) if trials else 0.0
    stderr = float(sums.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    # absolute floor guards the all-certain case, where the variance is zero
    ok = abs(mean - expected) <= 3 * stderr + 1e-9
    return McVerifyReport(trials, expected, mean, stderr, ok)


@dataclass(frozen=True)
class ValidationItem:
    name: str
    ok: bool
    detail: str


def validate(quick: bool = True) -> list[ValidationItem]:
    """Self-check suite: bijection, DP-vs-enumeration, MIS optima,
    solver-vs-ILP bounds, rounding uniqueness, feasibility."""
    from swapsched.dp import max_fidelity_numerology, min_weight_numerology
    from swapsched.flto import flto_solve
    from swapsched.fnpr import fnpr_solve, randomized_round, solve_fractional
    from swapsched.strategy import resource_cost

    items: list[ValidationItem] = []

    def record(name, ok, detail=""):
        items.append(ValidationItem(name, bool(ok), detail))

    # bijection round trips
    bad = 0
    total = 0
    for n, slots in itertools.product((2, 3, 4, 5), (3, 4, 5)):
        for tree, m in enumerate_numerologies(n, slots, lambda t, pos: 2):
            total += 1
            if numerology_to_tree(m) != tree:
                bad += 1
    record("bijection-round-trip", bad == 0, f"{total} trees, {bad} mismatches")

    # DP vs enumeration
    rng = np.random.default_rng(20_240_001)
    mism = 0
    cases = 120 if quick else 500
    model = FidelityModel()
    for _ in range(cases):
        n = int(rng.integers(2, 6))
        slots = int(rng.integers(2, 7))
        cap = [[0] * (n + 1)] + [
            [0] + [int(rng.integers(0, 4)) for _ in range(n)] for _ in range(slots)
        ]
        w = [[0.0] * (n + 1)] + [
            [0.0] + [float(rng.uniform(0, 1)) for _ in range(n)] for _ in range(slots)
        ]
        edge_f = [float(rng.uniform(0.5, 0.98)) for _ in range(n - 1)]
        trees = enumerate_numerologies(n, slots, lambda t, pos: cap[t][pos])
        w_map = {(t, pos): w[t][pos] for t in range(1, slots + 1) for pos in range(1, n + 1)}
        best_f = max((evaluate_fidelity(tr, edge_f, model) for tr, _ in trees), default=None)
        best_c = min((resource_cost(m, w_map) for _, m in trees), default=None)
        out_f = max_fidelity_numerology(n, slots, cap, edge_f, model)
        out_c = min_weight_numerology(n, slots, cap, w)
        if (best_f is None) != (out_f is None) or (
            best_f is not None and abs(out_f[2] - best_f) > 1e-9
        ):
            mism += 1
        if (best_c is None) != (out_c is None) or (
            best_c is not None and abs(out_c[2] - best_c) > 1e-9
        ):
            mism += 1
    record("dp-vs-enumeration", mism == 0, f"{cases} cases, {mism} mismatches")

    # MIS instances: brute-force optimum equals the independence number
    max_nv = 4 if quick else 5
    bad_mis = 0
    graphs = 0
    for nv in range(1, max_nv + 1):
        all_edges = list(itertools.combinations(range(nv), 2))
        for bits in range(1 << len(all_edges)):
            edges = [e for i, e in enumerate(all_edges) if bits >> i & 1]
            graphs += 1
            inst = mis_reduction(nv, edges)
            value, _ = ilp_optimum(inst, objective="count")
            if int(round(value)) != mis_size(nv, edges):
                bad_mis += 1
    record("mis-instances", bad_mis == 0, f"{graphs} graphs, {bad_mis} mismatches")

    # solvers never beat the exact optimum and stay feasible
    seeds = range(4) if quick else range(12)
    bad_bound = 0
    bad_feas = 0
    bad_round = 0
    for seed in seeds:
        cfg = ScenarioConfig(
            seed=seed, num_nodes=6, num_requests=3, num_slots=5,
            mem_min=1, mem_max=3, k_paths=2, region_w_km=60.0, region_h_km=60.0,
        )
        inst = build_instance(cfg)
        opt, _ = ilp_optimum(inst, objective="fidelity")
        frac = solve_fractional(inst, epsilon=0.1)
        tentative = randomized_round(frac, inst, substream(seed, "rounding"))
        per_req = {}
        for rid in tentative.entries:
            per_req[rid] = per_req.get(rid, 0) + 1
        if any(v > 1 for v in per_req.values()):
            bad_round += 1
        for alloc in (
            fnpr_solve(inst, mode="tetris", epsilon=0.1, seed=seed),
            flto_solve(inst),
        ):
            if alloc.expected_fidelity_sum > opt + 1e-9:
                bad_bound += 1
            if not alloc.is_feasible(inst, check_threshold=True):
                bad_feas += 1
    record("solver-vs-ilp", bad_bound == 0, f"{len(list(seeds))} instances, {bad_bound} violations")
    record("solver-feasibility", bad_feas == 0, f"{bad_feas} infeasible plans")
    record("rounding-uniqueness", bad_round == 0, f"{bad_round} multi-selections")
    return items
