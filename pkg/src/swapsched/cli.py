"""Command-line harness around the planners and experiment drivers."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path as FsPath

from swapsched import harness, serialize
from swapsched.base import SOLVER_NAMES, make_solver
from swapsched.instance import build_instance, mis_reduction, substream
from swapsched.topology import waxman_generate


def _load_config(args):
    config = serialize.read_config(args.config)
    if getattr(args, "seed", None) is not None:
        config = config.with_(seed=args.seed)
    return config


def _algos(arg):
    names = [a.strip() for a in arg.split(",") if a.strip()]
    for name in names:
        if name not in SOLVER_NAMES:
            raise SystemExit(f"unknown algorithm {name!r}; pick from {', '.join(SOLVER_NAMES)}")
    return names


def cmd_gen_topology(args):
    config = _load_config(args)
    topo = waxman_generate(config, substream(config.seed, "topology"))
    serialize.write_topology(topo, args.out)
    print(f"wrote {topo.num_nodes} nodes, {len(topo.edges)} edges to {args.out}")


def cmd_solve(args):
    config = _load_config(args)
    if args.topology:
        instance = serialize.instance_from_files(config, args.topology, args.requests)
    else:
        instance = build_instance(config)
    rows = harness.run_scenario(config, _algos(args.algo), instance=instance)
    serialize.write_metrics_csv(rows, args.out)
    if args.alloc_out:
        out_dir = FsPath(args.alloc_out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name in _algos(args.algo):
            solver = make_solver(name, config).fit(instance)
            if solver.allocation_ is not None:
                (out_dir / f"{name}.alloc").write_text(
                    serialize.allocation_to_text(solver.allocation_)
                )
    for row in rows:
        print(
            f"{row.algorithm}: expected_fidelity_sum={row.expected_fidelity_sum:.4f} "
            f"accepted={row.accepted_requests:.2f} runtime_ms={row.runtime_ms:.0f}"
        )


def cmd_sweep(args):
    config = _load_config(args)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    spec = harness.SweepSpec(
        base=config,
        param=args.param,
        values=tuple(values),
        seeds_per_point=args.reps,
        algorithms=tuple(_algos(args.algo)),
    )
    rows, summaries = harness.sweep(spec)
    serialize.write_metrics_csv(rows, args.out)
    if args.summary:
        serialize.write_summary_csv(summaries, args.summary)
    print(f"wrote {len(rows)} rows to {args.out}")


def cmd_fig3(args):
    config = _load_config(args)
    taus = [float(v) for v in args.taus.split(",")]
    slots = [int(v) for v in args.slots.split(",")]
    seeds = [config.seed + i for i in range(args.reps)]
    rows = harness.fig3_ratio_experiment(config, taus, slots, seeds)
    lines = ["tau_ms,num_slots,seed,request_id,path_idx,path_hops,ratio"]
    for r in rows:
        lines.append(
            f"{r.tau_ms!r},{r.num_slots},{r.seed},{r.request_id},{r.path_idx},{r.path_hops},{r.ratio!r}"
        )
    FsPath(args.out).write_text("\n".join(lines) + "\n")
    if args.summary:
        cells = {}
        for r in rows:
            cells.setdefault((r.tau_ms, r.num_slots), []).append(r.ratio)
        out = ["tau_ms,num_slots,n,mean_ratio"]
        for (tau, ns), ratios in sorted(cells.items()):
            out.append(f"{tau!r},{ns},{len(ratios)},{sum(ratios) / len(ratios)!r}")
        FsPath(args.summary).write_text("\n".join(out) + "\n")
    print(f"wrote {len(rows)} ratio rows to {args.out}")


def cmd_kappa(args):
    kappas = [float(v) for v in args.kappas.split(",")]
    rows = harness.kappa_experiment(kappas)
    lines = ["kappa,fidelity_set,shape,fidelity"]
    for r in rows:
        lines.append(f"{r.kappa!r},{r.fidelity_set},{r.shape},{r.fidelity!r}")
    FsPath(args.out).write_text("\n".join(lines) + "\n")
    print(f"wrote {len(rows)} rows to {args.out}")


def cmd_mis_gen(args):
    edges = []
    if args.edges:
        for chunk in args.edges.split(","):
            a, _, b = chunk.partition("-")
            edges.append((int(a), int(b)))
    instance = mis_reduction(args.vertices, edges)
    out_dir = FsPath(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    serialize.write_topology(instance.topology, out_dir / "topology.txt")
    serialize.write_requests(instance.requests, out_dir / "requests.txt")
    config = harness.ScenarioConfig(
        seed=0,
        num_nodes=instance.topology.num_nodes,
        num_requests=len(instance.requests),
        num_slots=instance.num_slots,
        slot_ms=instance.batch.tau_ms,
        entangle_ms=instance.batch.entangle_ms,
        swap_prob=1.0,
        link_prob_override=1.0,
        init_fid_min=0.99,
        init_fid_max=1.0,
        mem_min=1,
        mem_max=2,
        fidelity_threshold=0.0,
        mode="tetris_n",
    )
    serialize.write_config(config, out_dir / "config.txt")
    print(f"wrote MIS instance ({instance.topology.num_nodes} nodes) to {out_dir}")


def cmd_mc_verify(args):
    config = _load_config(args)
    if args.topology:
        instance = serialize.instance_from_files(config, args.topology, args.requests)
    else:
        instance = build_instance(config)
    alloc = serialize.allocation_from_text(FsPath(args.alloc).read_text(), instance)
    trials = args.trials or config.mc_trials
    report = harness.mc_verify(alloc, instance, trials, substream(config.seed, "monte_carlo"))
    status = "PASS" if report.within_three_sigma else "FAIL"
    print(
        f"{status}: expected={report.expected:.6f} empirical={report.empirical_mean:.6f} "
        f"stderr={report.stderr:.6f} trials={report.trials}"
    )
    if args.out:
        FsPath(args.out).write_text(
            f"trials = {report.trials}\nexpected = {report.expected!r}\n"
            f"empirical_mean = {report.empirical_mean!r}\nstderr = {report.stderr!r}\n"
            f"within_three_sigma = {report.within_three_sigma}\n"
        )
    return 0 if report.within_three_sigma else 1


def cmd_validate(args):
    items = harness.validate(quick=not args.full)
    failed = 0
    lines = []
    for item in items:
        status = "PASS" if item.ok else "FAIL"
        failed += not item.ok
        line = f"{status} {item.name}: {item.detail}"
        lines.append(line)
        print(line)
    if args.out:
        FsPath(args.out).write_text("\n".join(lines) + "\n")
    return 1 if failed else 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="swapsched", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="scenario config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")

    p = sub.add_parser("gen-topology", help="generate and write a topology file")
    common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_topology)

    p = sub.add_parser("solve", help="run planners on one scenario")
    common(p)
    p.add_argument("--algo", default="fnpr,flto", help="comma-separated algorithm list")
    p.add_argument("--topology", default=None, help="load topology instead of generating")
    p.add_argument("--requests", default=None, help="load explicit requests/paths")
    p.add_argument("--out", required=True, help="metrics CSV path")
    p.add_argument("--alloc-out", default=None, help="directory for allocation files")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="sweep one parameter across seeded repetitions")
    common(p)
    p.add_argument("--param", required=True)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--algo", default="fnpr,flto")
    p.add_argument("--out", required=True)
    p.add_argument("--summary", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fig3", help="max/min fidelity ratio grid")
    common(p)
    p.add_argument("--taus", default="1,2,3,4")
    p.add_argument("--slots", default="4,5,6,7")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--out", required=True)
    p.add_argument("--summary", default=None)
    p.set_defaults(func=cmd_fig3)

    p = sub.add_parser("kappa", help="skewed vs complete tree across kappa")
    p.add_argument("--kappas", default="1.0,1.1,1.2,1.3,1.4,1.5,1.6,1.7,1.8,1.9,2.0,2.1,2.2,2.3")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("mis-gen", help="adversarial instance from a conflict graph")
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--edges", default="", help="comma-separated a-b pairs, e.g. 0-1,1-2")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_mis_gen)

    p = sub.add_parser("mc-verify", help="Monte Carlo check of an allocation file")
    common(p)
    p.add_argument("--alloc", required=True)
    p.add_argument("--topology", default=None)
    p.add_argument("--requests", default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_mc_verify)

    p = sub.add_parser("validate", help="run the oracle self-check suites")
    p.add_argument("--full", action="store_true", help="larger case counts")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_validate)

    args = parser.parse_args(argv)
    result = args.func(args)
    return int(result) if result else 0


if __name__ == "__main__":
    sys.exit(main())
