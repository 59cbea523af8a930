"""Binary linear programs for both multivector-field models.

Model 2 (one toplex per multivector): variables z(sigma, tau) over proper
faces of toplexes; one equality row per non-toplex simplex forcing a
unique toplex, and one monotonicity row z(sigma_i, tau) <= z(sigma_j, tau)
per facet triple under a toplex.

Model 1 (generalized Forman matching): loop variables plus all strict face
pairs; coverage rows D z >= 1 (stored as -D z <= -1) and three convexity
row families per strict 3-chain.

LPs are solved by the in-house bounded-variable simplex for desk-scale
instances; instances whose dense tableau would not fit route to scipy's
HiGHS backend behind the same interface.  Binary optima come from a
depth-first branch-and-bound on the most fractional variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import lp
from .complexes import (
    SimplicialComplex,
    model1_triplets,
    model1_variables,
    model2_triplets,
    model2_variable_pairs,
)
from .cost import CostVector

INT_TOL = 1e-7
GAP_TOL = 1e-9
DENSE_LIMIT = 30_000_000  # tableau entries above which the scipy backend is used


class ContractError(ValueError):
    pass


@dataclass
class Solution:
    """Variable values with objective and solver status."""

    values: np.ndarray
    objective: Optional[float]
    status: str  # optimal | infeasible | iteration-limit
    iterations: int = 0
    nodes: int = 0

    def is_binary(self, tol: float = INT_TOL) -> bool:
        return bool(np.abs(self.values - np.round(self.values)).max(initial=0.0) <= tol)


@dataclass
class IlpInstance:
    """Sparse binary LP with its variable dictionary."""

    complex: Optional[SimplicialComplex]
    model: int
    tags: list[tuple[int, int]]
    costs: np.ndarray
    eq_rows: list[list[tuple[int, float]]]
    eq_rhs: list[float]
    le_rows: list[list[tuple[int, float]]]
    le_rhs: list[float]
    alpha: Optional[float] = None
    beta: Optional[float] = None
    var_index: dict = field(default_factory=dict, repr=False)
    _dense: Optional[tuple] = field(default=None, repr=False, compare=False)
    _sparse: Optional[tuple] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.costs = np.asarray(self.costs, dtype=float)
        if not self.var_index:
            self.var_index = {tag: j for j, tag in enumerate(self.tags)}

    @property
    def n_vars(self) -> int:
        return len(self.tags)

    def with_costs(self, costs: np.ndarray) -> "IlpInstance":
        inst = IlpInstance(
            self.complex, self.model, self.tags, costs,
            self.eq_rows, self.eq_rhs, self.le_rows, self.le_rhs,
            self.alpha, self.beta, self.var_index,
        )
        inst._dense = self._dense
        inst._sparse = self._sparse
        return inst

    def residuals(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(|eq row residuals|, positive le row violations)."""
        eq = np.array(
            [sum(c * values[j] for j, c in row) - r for row, r in zip(self.eq_rows, self.eq_rhs)]
        )
        le = np.array(
            [sum(c * values[j] for j, c in row) - r for row, r in zip(self.le_rows, self.le_rhs)]
        )
        return np.abs(eq) if len(eq) else np.zeros(0), np.maximum(le, 0.0) if len(le) else np.zeros(0)

    def is_feasible(self, values: np.ndarray, tol: float = INT_TOL) -> bool:
        eq, le = self.residuals(values)
        return bool(eq.max(initial=0.0) <= tol and le.max(initial=0.0) <= tol)


def build_model2(K: SimplicialComplex, costs: CostVector) -> IlpInstance:
    """Assemble the one-toplex-per-multivector program for K."""
    tags = model2_variable_pairs(K)
    if costs.model != 2 or list(costs.tags) != tags:
        raise ContractError("costs are not aligned with the Model-2 variable dictionary")
    var_index = {tag: j for j, tag in enumerate(tags)}
    by_sigma: dict[int, list[int]] = {}
    for j, (s, _t) in enumerate(tags):
        by_sigma.setdefault(s, []).append(j)
    toplex_set = set(K.toplexes)
    eq_rows, eq_rhs = [], []
    for s in range(len(K)):
        if s in toplex_set:
            continue
        eq_rows.append([(j, 1.0) for j in by_sigma[s]])
        eq_rhs.append(1.0)
    le_rows, le_rhs = [], []
    for si, sj, t in model2_triplets(K):
        le_rows.append([(var_index[(si, t)], 1.0), (var_index[(sj, t)], -1.0)])
        le_rhs.append(0.0)
    return IlpInstance(K, 2, tags, costs.costs, eq_rows, eq_rhs, le_rows, le_rhs)


def build_model1(
    K: SimplicialComplex, costs: CostVector, coverage: str = "geq"
) -> IlpInstance:
    """Assemble the generalized program for K.

    ``coverage`` selects the direction of the D z rows: "geq" (each simplex
    in at least one matching, the documented intent) or "leq" (at most
    one), both kept available for experimentation.
    """
    tags = model1_variables(K)
    if costs.model != 1 or list(costs.tags) != tags:
        raise ContractError("costs are not aligned with the Model-1 variable dictionary")
    if coverage not in ("geq", "leq"):
        raise ValueError("coverage must be 'geq' or 'leq'")
    var_index = {tag: j for j, tag in enumerate(tags)}
    covers: dict[int, list[int]] = {h: [] for h in range(len(K))}
    for j, (s, t) in enumerate(tags):
        covers[s].append(j)
        if t != s:
            covers[t].append(j)
    le_rows, le_rhs = [], []
    sign = -1.0 if coverage == "geq" else 1.0
    for h in range(len(K)):
        le_rows.append([(j, sign) for j in covers[h]])
        le_rhs.append(sign)
    trips = model1_triplets(K)
    for si, sj, t in trips:
        le_rows.append([(var_index[(si, t)], 1.0), (var_index[(sj, t)], -1.0)])
        le_rhs.append(0.0)
    for si, sj, t in trips:
        le_rows.append(
            [(var_index[(si, t)], 1.0), (var_index[(sj, t)], 1.0), (var_index[(si, sj)], -1.0)]
        )
        le_rhs.append(1.0)
    for si, sj, t in trips:
        le_rows.append(
            [(var_index[(si, sj)], 1.0), (var_index[(sj, t)], 1.0), (var_index[(si, t)], -1.0)]
        )
        le_rhs.append(1.0)
    return IlpInstance(
        K, 1, tags, costs.costs, [], [], le_rows, le_rhs,
        alpha=costs.alpha, beta=costs.beta,
    )


def model1_all_loops(instance: IlpInstance) -> Solution:
    """The always-feasible Model-1 point: every loop set, no pairs."""
    values = np.array([1.0 if s == t else 0.0 for s, t in instance.tags])
    return Solution(values, float(instance.costs @ values), "optimal")


# ---------------------------------------------------------------------------
# LP relaxation and exact binary solve
# ---------------------------------------------------------------------------


def _dense_data(instance: IlpInstance):
    if instance._dense is None:
        n = instance.n_vars
        A_eq, b_eq = lp.dense_rows(instance.eq_rows, instance.eq_rhs, n)
        A_le, b_le = lp.dense_rows(instance.le_rows, instance.le_rhs, n)
        instance._dense = (A_eq, b_eq, A_le, b_le)
    return instance._dense


def _sparse_data(instance: IlpInstance):
    from scipy import sparse

    if instance._sparse is None:
        n = instance.n_vars

        def build(rows, rhs):
            data, ri, ci = [], [], []
            for i, row in enumerate(rows):
                for j, c in row:
                    ri.append(i)
                    ci.append(j)
                    data.append(c)
            mat = sparse.csr_matrix((data, (ri, ci)), shape=(len(rows), n))
            return mat, np.asarray(rhs, dtype=float)

        instance._sparse = build(instance.eq_rows, instance.eq_rhs) + build(
            instance.le_rows, instance.le_rhs
        )
    return instance._sparse


def _tableau_entries(instance: IlpInstance) -> int:
    m = len(instance.eq_rows) + len(instance.le_rows)
    ncols = instance.n_vars + len(instance.le_rows) + len(instance.eq_rows)
    return (m + 1) * (ncols + 1)


def _pick_backend(instance: IlpInstance, backend: str) -> str:
    if backend != "auto":
        return backend
    return "tableau" if _tableau_entries(instance) <= DENSE_LIMIT else "highs"


def _crash_cols(instance: IlpInstance) -> Optional[np.ndarray]:
    """Feasible starting basis for Model 2 from the shaving construction."""
    if instance.model != 2 or instance.complex is None or not instance.eq_rows:
        return None
    cached = getattr(instance, "_crash", None)
    if cached is not None:
        return cached
    from .mvf import canonical_toplex_assignment

    K = instance.complex
    assign = canonical_toplex_assignment(K)
    toplex_set = set(K.toplexes)
    cols = []
    for s in range(len(K)):
        if s in toplex_set:
            continue
        cols.append(instance.var_index[(s, assign[s])])
    cols = np.asarray(cols, dtype=np.int64)
    instance._crash = cols
    return cols


def solve_lp_relaxation(
    instance: IlpInstance,
    lower: Optional[np.ndarray] = None,
    upper: Optional[np.ndarray] = None,
    backend: str = "auto",
) -> Solution:
    """Optimal basic solution of the relaxation with variables in [0, 1]."""
    n = instance.n_vars
    lo = np.zeros(n) if lower is None else np.asarray(lower, dtype=float)
    hi = np.ones(n) if upper is None else np.asarray(upper, dtype=float)
    if n == 0:
        feasible = all(abs(r) <= INT_TOL for r in instance.eq_rhs) and all(
            r >= -INT_TOL for r in instance.le_rhs
        )
        return Solution(np.zeros(0), 0.0 if feasible else None,
                        "optimal" if feasible else "infeasible")
    chosen = _pick_backend(instance, backend)
    if chosen == "highs":
        return _solve_lp_highs(instance, lo, hi)
    A_eq, b_eq, A_le, b_le = _dense_data(instance)
    crash = _crash_cols(instance)
    res = lp.solve_bounded_lp(
        instance.costs, lo, hi, A_eq, b_eq, A_le, b_le, crash_cols=crash
    )
    obj = None if res.status == "infeasible" else res.objective
    return Solution(res.x, obj, res.status, iterations=res.iterations)


def _solve_lp_highs(instance: IlpInstance, lo, hi) -> Solution:
    from scipy.optimize import linprog

    A_eq, b_eq, A_le, b_le = _sparse_data(instance)
    res = linprog(
        instance.costs,
        A_ub=A_le if A_le.shape[0] else None,
        b_ub=b_le if A_le.shape[0] else None,
        A_eq=A_eq if A_eq.shape[0] else None,
        b_eq=b_eq if A_eq.shape[0] else None,
        bounds=np.column_stack([lo, hi]),
        method="highs",
    )
    if res.status == 2:
        return Solution(np.full(instance.n_vars, np.nan), None, "infeasible")
    if not res.success:
        return Solution(np.full(instance.n_vars, np.nan), None, "iteration-limit")
    return Solution(np.asarray(res.x), float(res.fun), "optimal",
                    iterations=int(getattr(res, "nit", 0)))


def solve_ilp(
    instance: IlpInstance,
    warm_start: Optional[Solution] = None,
    node_limit: int = 1_000_000,
    backend: str = "auto",
) -> Solution:
    """Exact binary optimum via depth-first branch-and-bound.

    Branches on the most fractional variable (ties to the lowest index),
    prunes on the LP bound, and accepts a feasible binary warm start as
    the initial incumbent.  Model 2 defaults to the shaving solution,
    Model 1 to the all-loops solution.
    """
    n = instance.n_vars
    if n == 0:
        return solve_lp_relaxation(instance, backend=backend)

    best_vals: Optional[np.ndarray] = None
    best_obj = np.inf
    if warm_start is None:
        warm_start = default_warm_start(instance)
    if warm_start is not None:
        v = np.round(np.asarray(warm_start.values, dtype=float))
        if instance.is_feasible(v):
            best_vals = v
            best_obj = float(instance.costs @ v)

    nodes = 0
    iterations = 0
    limited = False
    stack = [(np.zeros(n), np.ones(n))]
    while stack:
        if nodes >= node_limit:
            limited = True
            break
        lo, hi = stack.pop()
        nodes += 1
        res = solve_lp_relaxation(instance, lo, hi, backend=backend)
        iterations += res.iterations
        if res.status == "infeasible":
            continue
        bound_valid = res.status == "optimal"
        if bound_valid and res.objective >= best_obj - GAP_TOL:
            continue
        x = res.values
        if not np.isfinite(x).all():
            unfixed = np.nonzero(lo != hi)[0]
            if len(unfixed) == 0:
                continue
            j = int(unfixed[0])
            first_one = False
        else:
            frac = np.abs(x - np.round(x))
            if frac.max(initial=0.0) <= INT_TOL:
                cand = np.where(x > 0.5, 1.0, 0.0)
                if instance.is_feasible(cand):
                    obj = float(instance.costs @ cand)
                    if obj < best_obj - GAP_TOL:
                        best_obj = obj
                        best_vals = cand
                continue
            j = int(np.argmax(frac))
            first_one = x[j] - np.floor(x[j]) >= 0.5
        children = []
        for value in ([1.0, 0.0] if first_one else [0.0, 1.0]):
            clo, chi = lo.copy(), hi.copy()
            clo[j] = chi[j] = value
            children.append((clo, chi))
        stack.extend(reversed(children))

    if best_vals is None:
        status = "iteration-limit" if limited else "infeasible"
        return Solution(np.full(n, np.nan), None, status, iterations, nodes)
    status = "iteration-limit" if limited else "optimal"
    return Solution(best_vals, best_obj, status, iterations, nodes)


def default_warm_start(instance: IlpInstance) -> Optional[Solution]:
    if instance.model == 2 and instance.complex is not None:
        from .mvf import canonical_feasible

        sol = canonical_feasible(instance.complex)
        sol.objective = float(instance.costs @ sol.values)
        return sol
    if instance.model == 1:
        return model1_all_loops(instance)
    return None


# ---------------------------------------------------------------------------
# Integrality conjecture harness
# ---------------------------------------------------------------------------


@dataclass
class IntegralityReport:
    rate: float
    reps: int
    results: list[dict]
    counterexamples: list[dict]

    def to_json(self) -> dict:
        return {
            "rate": self.rate,
            "reps": self.reps,
            "results": self.results,
            "counterexamples": self.counterexamples,
        }


def check_integrality(instance: IlpInstance, reps: int, seed: int) -> IntegralityReport:
    """Probe how often the LP relaxation of a Model-2 instance is integral.

    Each rep perturbs the costs by seeded uniform [0, 1e-6) noise so that
    all costs are pairwise distinct, solves the relaxation, and records
    whether the basic optimum is binary.  Fractional optima are serialized
    as counterexample LP files.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    results = []
    counterexamples = []
    n_integral = 0
    for rep in range(reps):
        rng = np.random.default_rng(np.random.PCG64([seed, rep]))
        costs = instance.costs + rng.random(instance.n_vars) * 1e-6
        inst = instance.with_costs(costs)
        res = solve_lp_relaxation(inst)
        integral = res.status == "optimal" and res.is_binary()
        n_integral += int(integral)
        results.append(
            {
                "rep": rep,
                "integral": bool(integral),
                "status": res.status,
                "objective": res.objective,
            }
        )
        if res.status == "optimal" and not integral:
            counterexamples.append({"rep": rep, "seed": seed, "lp": export_lp(inst)})
    return IntegralityReport(
        rate=n_integral / reps, reps=reps, results=results, counterexamples=counterexamples
    )


# ---------------------------------------------------------------------------
# Dimension audit against the printed count formulas
# ---------------------------------------------------------------------------


def instance_dimensions(instance: IlpInstance) -> dict:
    """Actual instance dimensions plus the printed-formula comparison.

    The comparison is recorded for pure complexes only (all toplexes of
    equal dimension d > 0) and is never asserted: the variable count
    matches the printed formula only when its d is read as the toplex
    vertex count, and the row count matches neither reading.
    """
    out = {
        "n_vars": instance.n_vars,
        "n_eq": len(instance.eq_rows),
        "n_le": len(instance.le_rows),
        "lemma_comparison": None,
    }
    K = instance.complex
    if K is None or instance.model != 2 or not K.toplexes:
        return out
    tdims = {int(K.dims[t]) for t in K.toplexes}
    if len(tdims) != 1 or tdims == {0}:
        return out
    d = tdims.pop()
    n_top = len(K.toplexes)
    enum_m = sum(2 ** (int(K.dims[t]) + 1) - 2 for t in K.toplexes)
    paper_m_dim = (2**d - 2) * n_top
    paper_m_vertex = (2 ** (d + 1) - 2) * n_top
    paper_n = (len(K) - n_top) + (d + 1) * (2**d - 1) * n_top
    actual_rows = len(instance.eq_rows) + len(instance.le_rows)
    out["lemma_comparison"] = {
        "toplex_dim": d,
        "n_toplexes": n_top,
        "enumerated_m": enum_m,
        "actual_m": instance.n_vars,
        "paper_m_with_d_as_dim": paper_m_dim,
        "paper_m_with_d_as_vertex_count": paper_m_vertex,
        "m_matches_vertex_count_reading": paper_m_vertex == instance.n_vars,
        "actual_rows": actual_rows,
        "paper_n": paper_n,
        "rows_match_paper": paper_n == actual_rows,
    }
    return out


# ---------------------------------------------------------------------------
# LP text export and the matching internal reader
# ---------------------------------------------------------------------------


def _var_name(K: Optional[SimplicialComplex], tag: tuple[int, int]) -> str:
    s, t = tag
    if K is not None:
        sv = "_".join(str(v) for v in K.simplices[s])
        tv = "_".join(str(v) for v in K.simplices[t])
    else:
        sv, tv = str(s), str(t)
    return f"z__{sv}__{tv}"


def _fmt_terms(row, names) -> str:
    parts = []
    for j, coef in row:
        sign = "+" if coef >= 0 else "-"
        parts.append(f"{sign} {repr(abs(coef))} {names[j]}")
    return " ".join(parts)


def export_lp(instance: IlpInstance) -> str:
    """Serialize to LP text (CPLEX-style) with variable names encoding
    the (sigma, tau) vertex lists; round-trips through parse_lp."""
    names = [_var_name(instance.complex, tag) for tag in instance.tags]
    lines = [f"\\ model {instance.model} instance", "Minimize"]
    obj = _fmt_terms(list(enumerate(instance.costs)), names)
    lines.append(f" obj: {obj}" if obj else " obj: 0")
    lines.append("Subject To")
    for i, (row, rhs) in enumerate(zip(instance.eq_rows, instance.eq_rhs)):
        lines.append(f" eq{i}: {_fmt_terms(row, names)} = {repr(float(rhs))}")
    for i, (row, rhs) in enumerate(zip(instance.le_rows, instance.le_rhs)):
        lines.append(f" le{i}: {_fmt_terms(row, names)} <= {repr(float(rhs))}")
    lines.append("Bounds")
    for name in names:
        lines.append(f" 0 <= {name} <= 1")
    lines.append("Binary")
    for name in names:
        lines.append(f" {name}")
    lines.append("End")
    return "\n".join(lines) + "\n"


_TERM_RE = re.compile(r"([+-])\s*([0-9.eE+-]+)\s+(\S+)")


def _parse_terms(text: str, var_index: dict) -> list[tuple[int, float]]:
    row = []
    for sign, coef, name in _TERM_RE.findall(text):
        value = float(coef) * (1.0 if sign == "+" else -1.0)
        row.append((var_index[name], value))
    return row


def parse_lp(text: str) -> IlpInstance:
    """Read back LP text produced by export_lp.

    The parsed instance has no complex attached; tags are recovered from
    the variable names as (sigma_vertices, tau_vertices) index pairs into
    a fresh name table, preserving row structure and costs exactly.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    section = None
    names: list[str] = []
    var_index: dict[str, int] = {}
    header = None
    for ln in lines:
        if ln.startswith("\\") and header is None:
            header = ln
    model = 2 if header and " 2 " in header else 1

    # First pass: collect variable names from the Binary section.
    in_binary = False
    for ln in lines:
        if ln == "Binary":
            in_binary = True
            continue
        if ln in ("End", "Bounds", "Subject To", "Minimize"):
            in_binary = False
            continue
        if in_binary and ln:
            names.append(ln)
    var_index = {name: j for j, name in enumerate(names)}

    costs = np.zeros(len(names))
    eq_rows, eq_rhs, le_rows, le_rhs = [], [], [], []
    for ln in lines:
        if ln in ("Minimize", "Subject To", "Bounds", "Binary", "End") or ln.startswith("\\"):
            section = ln
            continue
        if not ln:
            continue
        if section == "Minimize":
            body = ln.split(":", 1)[1] if ":" in ln else ln
            for j, coef in _parse_terms(body, var_index):
                costs[j] = coef
        elif section == "Subject To":
            body = ln.split(":", 1)[1]
            if "<=" in body:
                terms, rhs = body.split("<=")
                le_rows.append(_parse_terms(terms, var_index))
                le_rhs.append(float(rhs))
            else:
                terms, rhs = body.rsplit("=", 1)
                eq_rows.append(_parse_terms(terms, var_index))
                eq_rhs.append(float(rhs))

    tags = [(j, j) for j in range(len(names))]
    inst = IlpInstance(None, model, tags, costs, eq_rows, eq_rhs, le_rows, le_rhs)
    inst.var_names = names  # type: ignore[attr-defined]
    return inst
