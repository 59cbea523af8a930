"""Command-line interface.

Single-stage subcommands read and write the interchange files (samples
CSV/JSON, complex JSON, LP text, solution JSON, field JSON, report JSON,
DOT, SVG); ``pipeline`` runs everything from a config file with flag
overrides.

Exit codes: 0 success, 2 validation failure, 3 solver limit reached,
4 trajectory divergence.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import complexes, cost, dynamics, geometry, milp, mvf, pipeline, render, systems


def _parse_box(text):
    return [tuple(float(x) for x in part.split(",")) for part in text.split(";")]


def _add_common_build(p):
    p.add_argument("--model", type=int, default=2, choices=(1, 2))
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--cost-variant", default="base", choices=("base", "refined"))
    p.add_argument("--perturb", action="store_true")
    p.add_argument("--seed", type=int, default=0)


def _assignment_from(samples_path, complex_path):
    clusters = geometry.load_samples(samples_path)
    K = complexes.load_complex(complex_path)
    K.coords = {i: clusters.positions[i] for i in range(len(clusters))}
    return K, geometry.assign_vectors(K, clusters.velocities)


def _build_instance(args, K, assignment):
    if args.model == 2:
        cv = cost.model2_costs(K, assignment)
    elif args.cost_variant == "refined":
        cv = cost.refined_costs(K, assignment, args.alpha, args.beta)
    else:
        cv = cost.model1_costs(K, assignment, args.alpha, args.beta)
    if args.perturb:
        cv = cost.perturb_costs(cv, args.seed)
    return milp.build_model2(K, cv) if args.model == 2 else milp.build_model1(K, cv)


def cmd_sample(args) -> int:
    system = systems.builtin_system(args.system)
    if args.mode == "trajectory":
        x0 = [float(x) for x in args.x0.split(",")] if args.x0 else [0.0, 1.0, 1.05][: system.dim]
        cloud = systems.euler_trajectory(system, x0, args.dt, args.steps)
        cloud = systems.thin_trajectory(cloud, args.subsample)
    else:
        box = _parse_box(args.box) if args.box else system.default_box
        cloud = systems.sample_random(system, args.n, box, args.seed)
    geometry.save_samples(cloud, args.out)
    return 0


def cmd_cluster(args) -> int:
    cloud = geometry.load_samples(args.samples)
    velocity_fn = systems.builtin_system(args.system).rhs if args.system else None
    reps = geometry.kmeans(cloud, args.k, args.seed, velocity_fn=velocity_fn)
    geometry.save_samples(reps, args.out)
    return 0


def cmd_triangulate(args) -> int:
    cloud = geometry.load_samples(args.samples)
    K = geometry.delaunay(cloud.positions, args.seed)
    complexes.dump_complex(K, args.out)
    return 0


def cmd_build(args) -> int:
    K, assignment = _assignment_from(args.samples, args.complex)
    instance = _build_instance(args, K, assignment)
    with open(args.out, "w") as fh:
        fh.write(milp.export_lp(instance))
    return 0


def cmd_solve(args) -> int:
    with open(args.lp) as fh:
        instance = milp.parse_lp(fh.read())
    sol = milp.solve_ilp(instance, node_limit=args.node_limit, backend=args.backend)
    with open(args.out, "w") as fh:
        json.dump(
            {
                "values": [float(v) for v in np.atleast_1d(sol.values)],
                "objective": sol.objective,
                "status": sol.status,
            },
            fh,
            sort_keys=True,
        )
        fh.write("\n")
    return 3 if sol.status == "iteration-limit" else (2 if sol.status == "infeasible" else 0)


def cmd_extract(args) -> int:
    K = complexes.load_complex(args.complex)
    with open(args.solution) as fh:
        values = np.asarray(json.load(fh)["values"], dtype=float)
    if args.model == 2:
        field = mvf.extract_model2(K, values)
    else:
        field = mvf.repair_convexity(K, mvf.extract_model1(K, values))
    mvf.dump_field(field, args.out)
    return 0


def cmd_analyze(args) -> int:
    field = mvf.load_field(args.field)
    flags = dynamics.criticality(field)
    report = dynamics.morse_decomposition(field, flags)
    K = field.complex
    data = {
        "counts": {
            "simplices": len(K),
            "multivectors": len(field),
            "critical_multivectors": sum(flags),
        },
        "morse_sets": [
            {
                "index": i,
                "n_multivectors": ms.n_multivectors,
                "exit_set_size": len(ms.exit_set),
                "conley": None if ms.conley is None else list(ms.conley),
                "label": ms.label,
            }
            for i, ms in enumerate(report.morse_sets)
        ],
        "order": [list(p) for p in report.order],
        "scc_sizes": sorted((len(c) for c in report.sccs), reverse=True),
    }
    with open(args.out, "w") as fh:
        json.dump(data, fh, sort_keys=True, indent=2)
        fh.write("\n")
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(dynamics.condensation_dot(field, report))
    return 0


def cmd_render(args) -> int:
    clusters = geometry.load_samples(args.samples)
    field = mvf.load_field(args.field)
    K = field.complex
    K.coords = {i: clusters.positions[i] for i in range(len(clusters))}
    assignment = geometry.assign_vectors(K, clusters.velocities)
    flags = dynamics.criticality(field)
    report = dynamics.morse_decomposition(field, flags)
    svg = render.render_svg(field, assignment, report, mode=args.mode)
    with open(args.out, "w") as fh:
        fh.write(svg)
    return 0


def _config_from_args(args) -> pipeline.PipelineConfig:
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    overrides = {
        "system": args.system,
        "model": args.model,
        "alpha": args.alpha,
        "beta": args.beta,
        "seed": args.seed,
        "n_clusters": args.clusters,
        "out_dir": args.out,
        "lp_backend": args.backend,
    }
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    return pipeline.PipelineConfig.from_json(data)


def cmd_pipeline(args) -> int:
    config = _config_from_args(args)
    report = pipeline.run_pipeline(config)
    sys.stdout.write(report.dumps())
    if not report.validation_ok:
        return 2
    if report.solver["status"] == "iteration-limit":
        return 3
    return 0


def cmd_check_integrality(args) -> int:
    config = _config_from_args(args)
    report = pipeline.check_integrality_run(config, args.reps)
    sys.stdout.write(json.dumps({"rate": report.rate, "reps": report.reps}, sort_keys=True) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mvfield", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a built-in system")
    p.add_argument("--system", required=True)
    p.add_argument("--mode", default="random", choices=("random", "trajectory"))
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--box", help="per-axis min,max pairs joined by ';'")
    p.add_argument("--x0")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--steps", type=int, default=20000)
    p.add_argument("--subsample", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("cluster", help="k-means reduction of a sample file")
    p.add_argument("--samples", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--system", help="re-evaluate velocities of this system at centroids")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_cluster)

    p = sub.add_parser("triangulate", help="Delaunay complex of a sample file")
    p.add_argument("--samples", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_triangulate)

    p = sub.add_parser("build", help="emit the binary program as LP text")
    p.add_argument("--samples", required=True)
    p.add_argument("--complex", required=True)
    _add_common_build(p)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("solve", help="solve an LP file exactly over binaries")
    p.add_argument("--lp", required=True)
    p.add_argument("--node-limit", type=int, default=1_000_000)
    p.add_argument("--backend", default="auto", choices=("auto", "tableau", "highs"))
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("extract", help="solution -> multivector field")
    p.add_argument("--complex", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--model", type=int, default=2, choices=(1, 2))
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_extract)

    p = sub.add_parser("analyze", help="Morse decomposition of a field")
    p.add_argument("--field", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dot")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("render", help="SVG figure of a 2D field")
    p.add_argument("--field", required=True)
    p.add_argument("--samples", required=True, help="cluster file with coordinates")
    p.add_argument("--mode", default="field", choices=("field", "gradient", "morse"))
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_render)

    for name, fn in (("pipeline", cmd_pipeline), ("check-integrality", cmd_check_integrality)):
        p = sub.add_parser(name)
        p.add_argument("--config")
        p.add_argument("--system")
        p.add_argument("--model", type=int, choices=(1, 2))
        p.add_argument("--alpha", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--clusters", type=int)
        p.add_argument("--backend", choices=("auto", "tableau", "highs"))
        p.add_argument("--out")
        if name == "check-integrality":
            p.add_argument("--reps", type=int, default=20)
        p.set_defaults(fn=fn)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except systems.DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except pipeline.StageError as exc:
        if isinstance(exc.cause, systems.DivergenceError):
            print(f"error: {exc}", file=sys.stderr)
            return 4
        if isinstance(exc.cause, milp.ContractError):
            print(f"error: {exc}", file=sys.stderr)
            return 2
        raise
    except milp.ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
