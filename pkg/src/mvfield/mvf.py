"""Multivector fields: partitions of a complex into convex sets.

Contains the solution-to-field extractions for both models, the shaving
construction that proves Model-2 feasibility (each multivector keeps a
single toplex), the convexity repair for Model-1 output, and an
executable validator for the partition-plus-convexity axioms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Optional, Sequence

import numpy as np

from .complexes import SimplicialComplex, closure, convexity_witness, model1_variables, model2_variable_pairs
from .milp import ContractError, Solution


class CoverageError(ContractError):
    """A simplex is covered by no active variable (violates D z >= 1)."""


class MultivectorField:
    """A partition of the complex; parts ordered by lowest contained handle."""

    def __init__(self, K: SimplicialComplex, parts: Iterable[Iterable[int]], model: Optional[int] = None):
        self.complex = K
        self.parts: list[frozenset[int]] = sorted(
            (frozenset(int(h) for h in p) for p in parts), key=lambda p: min(p) if p else -1
        )
        self.model = model
        self.index = np.full(len(K), -1, dtype=np.int64)
        for pid, part in enumerate(self.parts):
            for h in part:
                self.index[h] = pid

    def __len__(self) -> int:
        return len(self.parts)

    def part_of(self, h: int) -> int:
        return int(self.index[h])

    def to_json(self) -> dict:
        K = self.complex
        return {
            "parts": [[list(K.simplices[h]) for h in sorted(p)] for p in self.parts],
            "model": self.model,
        }


def field_from_json(data: dict, K: Optional[SimplicialComplex] = None) -> MultivectorField:
    """Rebuild a field from its JSON form; the complex is reconstructed
    from the parts when not supplied (a field covers a closed complex)."""
    if K is None:
        from .complexes import build_complex

        K = build_complex([s for part in data["parts"] for s in part])
    parts = [[K.handle(s) for s in part] for part in data["parts"]]
    return MultivectorField(K, parts, model=data.get("model"))


def dump_field(field: MultivectorField, path) -> None:
    with open(path, "w") as fh:
        json.dump(field.to_json(), fh, sort_keys=True)
        fh.write("\n")


def load_field(path, K: Optional[SimplicialComplex] = None) -> MultivectorField:
    with open(path) as fh:
        return field_from_json(json.load(fh), K)


@dataclass
class ValidationReport:
    violations: list[dict] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(field: MultivectorField) -> ValidationReport:
    """Check the partition axioms and per-part convexity; report-only."""
    report = ValidationReport()
    K = field.complex
    seen = np.zeros(len(K), dtype=np.int64)
    for pid, part in enumerate(field.parts):
        if not part:
            report.violations.append({"kind": "empty-part", "part": pid})
            continue
        for h in part:
            seen[h] += 1
    uncovered = np.nonzero(seen == 0)[0]
    for h in uncovered:
        report.violations.append({"kind": "uncovered", "simplex": list(K.simplices[h])})
    for h in np.nonzero(seen > 1)[0]:
        report.violations.append({"kind": "overlap", "simplex": list(K.simplices[h])})
    for pid, part in enumerate(field.parts):
        w = convexity_witness(K, part)
        if w is not None:
            report.violations.append(
                {
                    "kind": "non-convex",
                    "part": pid,
                    "witness": [list(K.simplices[h]) for h in w],
                }
            )
    return report


# ---------------------------------------------------------------------------
# Model 2: extraction and the shaving feasibility witness
# ---------------------------------------------------------------------------


def extract_model2(K: SimplicialComplex, solution: Solution | np.ndarray) -> MultivectorField:
    """Turn a feasible binary Model-2 solution into its multivector field:
    V_tau = {sigma : z(sigma, tau) = 1} + {tau} for each toplex tau."""
    values = solution.values if isinstance(solution, Solution) else np.asarray(solution, dtype=float)
    tags = model2_variable_pairs(K)
    if len(values) != len(tags):
        raise ContractError("solution length does not match the Model-2 variable dictionary")
    if len(values) and np.abs(values - np.round(values)).max(initial=0.0) > 1e-7:
        raise ContractError("solution is not binary")
    z = {tag: int(round(v)) for tag, v in zip(tags, values)}

    toplex_set = set(K.toplexes)
    chosen: dict[int, int] = {}
    for (s, t), v in z.items():
        if v:
            if s in chosen:
                raise ContractError(f"simplex {K.simplices[s]} matched to two toplexes")
            chosen[s] = t
    for s in range(len(K)):
        if s not in toplex_set and s not in chosen:
            raise ContractError(f"simplex {K.simplices[s]} matched to no toplex")
    for (s, t), v in z.items():
        if v:
            for c in K.cofacets[s]:
                if c != t and K.leq(c, t) and not z.get((c, t), 0):
                    raise ContractError("monotonicity row violated by the given solution")

    parts: dict[int, set[int]] = {t: {t} for t in K.toplexes}
    for s, t in chosen.items():
        parts[t].add(s)
    field = MultivectorField(K, [parts[t] for t in K.toplexes], model=2)
    report = validate(field)
    if not report.ok:
        raise ContractError(f"extracted field failed validation: {report.violations[:3]}")
    return field


def _components(K: SimplicialComplex) -> list[set[int]]:
    parent = list(range(len(K)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for h in range(len(K)):
        for f in K.facets[h]:
            ra, rb = find(h), find(f)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    comps: dict[int, set[int]] = {}
    for h in range(len(K)):
        comps.setdefault(find(h), set()).add(h)
    return [comps[r] for r in sorted(comps)]


def canonical_toplex_assignment(K: SimplicialComplex, rng=None) -> dict[int, int]:
    """Assign every simplex a toplex above it by the shaving procedure.

    Starts from one part per connected component and repeatedly splits off,
    from a part with several maximal simplices, the members whose only
    maximal coface in the part is the chosen toplex.  Both pieces stay
    convex, so the loop ends with single-toplex convex parts.  Choices are
    lowest-index, or drawn from ``rng`` when given.
    """
    pending = _components(K)
    out: dict[int, int] = {}
    while pending:
        splittable = []
        for part in sorted(pending, key=min):
            maxima = sorted(h for h in part if not any(c in part for c in K.cofacets[h]))
            if len(maxima) == 1:
                for h in part:
                    out[h] = maxima[0]
            else:
                splittable.append((part, maxima))
        pending = []
        for part, maxima in splittable:
            if rng is None:
                tau = maxima[0]
            else:
                tau = maxima[int(rng.integers(len(maxima)))]
            v2 = {h for h in part if [m for m in maxima if K.leq(h, m)] == [tau]}
            pending.append(v2)
            pending.append(part - v2)
    return out


def canonical_feasible(K: SimplicialComplex, rng=None) -> Solution:
    """A feasible binary Model-2 solution from the shaving construction."""
    assign = canonical_toplex_assignment(K, rng=rng)
    tags = model2_variable_pairs(K)
    values = np.array(
        [1.0 if assign.get(s) == t and s != t else 0.0 for s, t in tags]
    )
    return Solution(values, None, "feasible")


def random_feasible(K: SimplicialComplex, seed: int) -> Solution:
    """A seeded random feasible binary Model-2 solution (random shaving)."""
    rng = np.random.default_rng(np.random.PCG64(seed))
    return canonical_feasible(K, rng=rng)


# ---------------------------------------------------------------------------
# Model 1: raw extraction and convexity repair
# ---------------------------------------------------------------------------


def extract_model1(K: SimplicialComplex, solution: Solution | np.ndarray) -> list[frozenset[int]]:
    """Partition induced by a binary Model-1 solution: connected components
    of the relation declared by active pair variables.  Convexity is NOT
    guaranteed; run repair_convexity on the result."""
    values = solution.values if isinstance(solution, Solution) else np.asarray(solution, dtype=float)
    tags = model1_variables(K)
    if len(values) != len(tags):
        raise ContractError("solution length does not match the Model-1 variable dictionary")
    if len(values) and np.abs(values - np.round(values)).max(initial=0.0) > 1e-7:
        raise ContractError("solution is not binary")

    covered = np.zeros(len(K), dtype=bool)
    parent = list(range(len(K)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (s, t), v in zip(tags, values):
        if v < 0.5:
            continue
        covered[s] = covered[t] = True
        if s != t:
            ra, rb = find(s), find(t)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    missing = np.nonzero(~covered)[0]
    if len(missing):
        raise CoverageError(
            f"simplices covered by no active variable: {[list(K.simplices[h]) for h in missing[:5]]}"
        )
    groups: dict[int, set[int]] = {}
    for h in range(len(K)):
        groups.setdefault(find(h), set()).add(h)
    return [frozenset(groups[r]) for r in sorted(groups)]


def repair_convexity(K: SimplicialComplex, parts: Sequence[Iterable[int]]) -> MultivectorField:
    """Refine a partition until every part is convex.

    Non-convex parts are split along cl(rho) for a maximal member rho above
    the witness's bottom simplex when both pieces stay convex; otherwise
    the witness's top simplex is extracted as a singleton.  Each step
    strictly shrinks a part, so this terminates, and the output refines
    the input partition part by part.
    """
    stack = [frozenset(int(h) for h in p) for p in parts]
    done: list[frozenset[int]] = []
    while stack:
        part = stack.pop()
        if not part:
            continue
        w = convexity_witness(K, part)
        if w is None:
            done.append(part)
            continue
        x, _y, z = w
        maxima = sorted(
            h for h in part if not any(h != o and K.leq(h, o) for o in part)
        )
        split = None
        for rho in maxima:
            if not K.leq(x, rho):
                continue
            v1 = frozenset(closure(K, [rho]) & part)
            v2 = part - v1
            if v1 and v2 and convexity_witness(K, v1) is None and convexity_witness(K, v2) is None:
                split = (v1, v2)
                break
        if split is None:
            split = (frozenset([z]), part - {z})
        stack.extend(split)
    return MultivectorField(K, done, model=1)
