"""Objective-function cost vectors for both optimization models.

A variable ties a simplex sigma to a coface tau; its cost is the cosine
dissimilarity between the sample vector V(sigma) and the barycenter
displacement W(sigma, tau) = b(tau) - b(sigma).  Vanishing sample vectors
get the worst cost 2.  Model 1 additionally carries loop variables
(sigma, sigma) priced at alpha and subtracts a matching bonus beta from
every pair cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .complexes import SimplicialComplex, model1_variables, model2_variable_pairs
from .geometry import ZERO_VELOCITY_TOL, VectorAssignment, w_map

ZERO_VECTOR_COST = 2.0


@dataclass
class CostVector:
    """Costs aligned with a model's variable dictionary."""

    costs: np.ndarray
    tags: list[tuple[int, int]]
    model: int
    alpha: Optional[float] = None
    beta: Optional[float] = None

    def __post_init__(self):
        self.costs = np.asarray(self.costs, dtype=float)
        if len(self.costs) != len(self.tags):
            raise ValueError("cost vector length must match variable dictionary")
        if not np.isfinite(self.costs).all():
            raise ValueError("costs must be finite")


def cosine_dissimilarity(u: np.ndarray, v: np.ndarray) -> float:
    """1 - cos(angle(u, v)), in [0, 2].  Raises on zero-norm input."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine dissimilarity undefined for zero vectors")
    return 1.0 - float(np.dot(u, v)) / (nu * nv)


def _pair_cost(assignment: VectorAssignment, s: int, t: int) -> float:
    v = assignment.vectors[s]
    if float(np.linalg.norm(v)) < ZERO_VELOCITY_TOL:
        return ZERO_VECTOR_COST
    return cosine_dissimilarity(v, w_map(assignment, s, t))


def model2_costs(K: SimplicialComplex, assignment: VectorAssignment) -> CostVector:
    """Base costs for the one-toplex-per-multivector model."""
    tags = model2_variable_pairs(K)
    costs = np.array([_pair_cost(assignment, s, t) for s, t in tags])
    return CostVector(costs, tags, model=2)


def model1_costs(
    K: SimplicialComplex, assignment: VectorAssignment, alpha: float, beta: float
) -> CostVector:
    """Costs for the generalized model: loops cost alpha, pairs get the
    base cost minus the matching bonus beta."""
    tags = model1_variables(K)
    costs = np.empty(len(tags))
    for j, (s, t) in enumerate(tags):
        costs[j] = alpha if s == t else _pair_cost(assignment, s, t) - beta
    return CostVector(costs, tags, model=1, alpha=alpha, beta=beta)


def refined_costs(
    K: SimplicialComplex, assignment: VectorAssignment, alpha: float, beta: float
) -> CostVector:
    """Model-1 costs discounted by the base costs of intermediate matchings.

    For each pair (sigma, tau) the base costs of (sigma, rho) over all
    strictly intermediate rho are subtracted, which prices a convex block
    closer to its single coarse matching and favors larger multivectors.
    """
    base = model1_costs(K, assignment, alpha, beta)
    costs = base.costs.copy()
    for j, (s, t) in enumerate(base.tags):
        if s == t:
            continue
        for rho in K.proper_faces(t):
            if rho != s and K.leq(s, rho):
                costs[j] -= _pair_cost(assignment, s, rho)
    return CostVector(costs, base.tags, model=1, alpha=alpha, beta=beta)


def perturb_costs(cv: CostVector, seed: int, scale: float = 1e-6) -> CostVector:
    """Add seeded uniform [0, scale) noise, making ties vanishingly unlikely.

    Used by the LP-integrality experiments, which require pairwise-distinct
    costs; regular pipeline runs leave costs untouched.
    """
    rng = np.random.default_rng(np.random.PCG64(seed))
    noisy = cv.costs + rng.random(len(cv.costs)) * scale
    return CostVector(noisy, cv.tags, cv.model, cv.alpha, cv.beta)
