"""End-to-end pipeline: samples -> clusters -> complex -> costs -> binary
program -> multivector field -> Morse decomposition -> report + figures.

A run is a pure function of its configuration: fixed PCG64 streams drive
sampling, clustering, triangulation tie-breaks and cost perturbation, so
repeated runs emit byte-identical report JSON.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from . import complexes, cost, dynamics, geometry, milp, mvf, render, systems
from .kernels import BACKEND


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")


@dataclass
class PipelineConfig:
    system: Optional[str] = None
    dataset: Optional[str] = None
    sampling: str = "random"  # random | trajectory
    n_samples: int = 1000
    sample_box: Optional[list] = None
    x0: Optional[list] = None
    dt: float = 0.01
    steps: int = 20000
    subsample: int = 1000
    n_clusters: int = 100
    model: int = 2
    alpha: float = 0.5
    beta: float = 0.5
    cost_variant: str = "base"  # base | refined
    coverage: str = "geq"
    seed: int = 0
    velocity_mode: str = "auto"  # auto | mean | reevaluate
    lp_backend: str = "auto"
    node_limit: int = 1_000_000
    perturb: bool = False
    render: bool = True
    export_lp: bool = False
    out_dir: Optional[str] = None

    def __post_init__(self):
        if self.system is None and self.dataset is None:
            raise geometry.ParameterError("config needs a system name or a dataset path")
        if self.model not in (1, 2):
            raise geometry.ParameterError("model must be 1 or 2")
        if self.sampling not in ("random", "trajectory"):
            raise geometry.ParameterError("sampling must be 'random' or 'trajectory'")

    def to_json(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("out_dir")  # reports must not depend on where they are written
        return d

    @staticmethod
    def from_json(data: dict) -> "PipelineConfig":
        known = {f.name for f in dataclasses.fields(PipelineConfig)}
        return PipelineConfig(**{k: v for k, v in data.items() if k in known})


@dataclass
class RunReport:
    config: dict
    counts: dict
    morse_sets: list
    order: list
    scc_sizes: list
    critical_parts: list
    objective: Optional[float]
    solver: dict
    kernel_backend: str
    validation_ok: bool
    dimension_audit: dict

    def to_json(self) -> dict:
        return dataclasses.asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def _stage(name):
    def deco(fn):
        def wrapped(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except StageError:
                raise
            except Exception as exc:
                raise StageError(name, exc) from exc

        return wrapped

    return deco


@_stage("sample")
def _sample_stage(config: PipelineConfig) -> geometry.SampleCloud:
    if config.dataset is not None:
        return geometry.load_samples(config.dataset)
    system = systems.builtin_system(config.system)
    if config.sampling == "trajectory":
        x0 = config.x0 if config.x0 is not None else [0.0, 1.0, 1.05][: system.dim]
        cloud = systems.euler_trajectory(system, x0, config.dt, config.steps)
        return systems.thin_trajectory(cloud, config.subsample)
    box = config.sample_box if config.sample_box is not None else system.default_box
    return systems.sample_random(system, config.n_samples, box, config.seed)


@_stage("cluster")
def _cluster_stage(config: PipelineConfig, cloud: geometry.SampleCloud) -> geometry.SampleCloud:
    velocity_fn = None
    mode = config.velocity_mode
    if mode == "auto":
        mode = "reevaluate" if config.system is not None else "mean"
    if mode == "reevaluate":
        if config.system is None:
            raise geometry.ParameterError("velocity_mode=reevaluate needs a named system")
        velocity_fn = systems.builtin_system(config.system).rhs
    return geometry.kmeans(cloud, config.n_clusters, config.seed, velocity_fn=velocity_fn)


@_stage("triangulate")
def _triangulate_stage(config: PipelineConfig, clusters: geometry.SampleCloud):
    return geometry.delaunay(clusters.positions, config.seed)


@_stage("build")
def _build_stage(config: PipelineConfig, K, assignment):
    if config.model == 2:
        cv = cost.model2_costs(K, assignment)
    elif config.cost_variant == "refined":
        cv = cost.refined_costs(K, assignment, config.alpha, config.beta)
    else:
        cv = cost.model1_costs(K, assignment, config.alpha, config.beta)
    if config.perturb:
        cv = cost.perturb_costs(cv, config.seed)
    if config.model == 2:
        return milp.build_model2(K, cv)
    return milp.build_model1(K, cv, coverage=config.coverage)


@_stage("solve")
def _solve_stage(config: PipelineConfig, instance: milp.IlpInstance):
    relax = milp.solve_lp_relaxation(instance, backend=config.lp_backend)
    integral = relax.status == "optimal" and relax.is_binary()
    if integral:
        values = np.where(relax.values > 0.5, 1.0, 0.0)
        if instance.is_feasible(values):
            sol = milp.Solution(values, float(instance.costs @ values), "optimal",
                                iterations=relax.iterations, nodes=1)
            return sol, True
    sol = milp.solve_ilp(
        instance, node_limit=config.node_limit, backend=config.lp_backend
    )
    return sol, integral


@_stage("extract")
def _extract_stage(config: PipelineConfig, K, solution):
    if config.model == 2:
        return mvf.extract_model2(K, solution)
    raw = mvf.extract_model1(K, solution)
    return mvf.repair_convexity(K, raw)


@_stage("analyze")
def _analyze_stage(field: mvf.MultivectorField):
    flags = dynamics.criticality(field)
    report = dynamics.morse_decomposition(field, flags)
    return flags, report


def run_pipeline(config: PipelineConfig) -> RunReport:
    """Execute the full pipeline and (optionally) write artifacts."""
    samples = _sample_stage(config)
    clusters = _cluster_stage(config, samples)
    K = _triangulate_stage(config, clusters)
    try:
        assignment = geometry.assign_vectors(K, clusters.velocities)
    except Exception as exc:
        raise StageError("assign", exc) from exc
    instance = _build_stage(config, K, assignment)
    solution, lp_integral = _solve_stage(config, instance)
    if solution.objective is None or not np.isfinite(np.asarray(solution.values, dtype=float)).all():
        raise StageError("solve", RuntimeError(f"no feasible solution ({solution.status})"))
    field = _extract_stage(config, K, solution)
    validation = mvf.validate(field)
    flags, morse = _analyze_stage(field)

    d = K.dim
    critical_parts = [
        {
            "part": pid,
            "size": len(field.parts[pid]),
            "betti": list(homology_index(field, pid)),
        }
        for pid, f in enumerate(flags)
        if f
    ]
    morse_json = []
    for mi, ms in enumerate(morse.morse_sets):
        betti = None if ms.conley is None else list(ms.conley) + [0] * (d + 1 - len(ms.conley))
        morse_json.append(
            {
                "index": mi,
                "n_multivectors": ms.n_multivectors,
                "n_simplices": len(ms.handles),
                "exit_set_size": len(ms.exit_set),
                "conley": betti,
                "label": ms.label,
                "parity": ms.parity,
            }
        )
    scc_sizes = sorted((len(c) for c in morse.sccs), reverse=True)
    grad = dynamics.gradient_part(field, morse)

    report = RunReport(
        config=config.to_json(),
        counts={
            "samples": len(samples),
            "clusters": len(clusters),
            "simplices": len(K),
            "toplexes": len(K.toplexes),
            "multivectors": len(field),
            "critical_multivectors": sum(flags),
            "gradient_simplices": len(grad),
        },
        morse_sets=morse_json,
        order=[list(p) for p in morse.order],
        scc_sizes=scc_sizes,
        critical_parts=critical_parts,
        objective=solution.objective,
        solver={
            "status": solution.status,
            "iterations": int(solution.iterations),
            "nodes": int(solution.nodes),
            "lp_integral": bool(lp_integral),
            "backend": config.lp_backend,
        },
        kernel_backend=BACKEND,
        validation_ok=validation.ok,
        dimension_audit=milp.instance_dimensions(instance),
    )

    if config.out_dir:
        _write_artifacts(config, report, samples, clusters, K, assignment,
                         instance, solution, field, morse)
    return report


def homology_index(field: mvf.MultivectorField, pid: int) -> tuple:
    from . import homology

    return homology.relative_betti(field.complex, field.parts[pid])


def _active_pairs(instance: milp.IlpInstance, solution: milp.Solution):
    return [
        tag
        for tag, v in zip(instance.tags, solution.values)
        if v > 0.5 and tag[0] != tag[1]
    ]


def _write_artifacts(config, report, samples, clusters, K, assignment,
                     instance, solution, field, morse):
    out = config.out_dir
    os.makedirs(out, exist_ok=True)
    geometry.save_samples(samples, os.path.join(out, "samples.csv"))
    geometry.save_samples(clusters, os.path.join(out, "clusters.csv"))
    complexes.dump_complex(K, os.path.join(out, "complex.json"))
    mvf.dump_field(field, os.path.join(out, "field.json"))
    with open(os.path.join(out, "solution.json"), "w") as fh:
        json.dump(
            {
                "values": [float(v) for v in solution.values],
                "objective": solution.objective,
                "status": solution.status,
            },
            fh,
            sort_keys=True,
        )
        fh.write("\n")
    with open(os.path.join(out, "report.json"), "w") as fh:
        fh.write(report.dumps())
    with open(os.path.join(out, "digraph.dot"), "w") as fh:
        fh.write(dynamics.condensation_dot(field, morse))
    if config.export_lp:
        with open(os.path.join(out, "instance.lp"), "w") as fh:
            fh.write(milp.export_lp(instance))
    if config.render and assignment.dim == 2:
        arrows = _active_pairs(instance, solution)
        for mode in ("field", "gradient", "morse"):
            svg = render.render_svg(field, assignment, morse, arrows, mode=mode)
            with open(os.path.join(out, f"{mode}.svg"), "w") as fh:
                fh.write(svg)


def check_integrality_run(config: PipelineConfig, reps: int) -> milp.IntegralityReport:
    """Build the instance for a config and probe LP integrality on it."""
    samples = _sample_stage(config)
    clusters = _cluster_stage(config, samples)
    K = _triangulate_stage(config, clusters)
    assignment = geometry.assign_vectors(K, clusters.velocities)
    instance = _build_stage(config, K, assignment)
    report = milp.check_integrality(instance, reps, config.seed)
    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        data = report.to_json()
        files = []
        for i, ce in enumerate(data["counterexamples"]):
            name = f"counterexample_{i}.lp"
            with open(os.path.join(config.out_dir, name), "w") as fh:
                fh.write(ce["lp"])
            files.append(name)
        data["counterexamples"] = files
        with open(os.path.join(config.out_dir, "integrality.json"), "w") as fh:
            json.dump(data, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return report
