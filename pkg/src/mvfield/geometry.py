"""From raw (point, velocity) samples to complexes and vector assignments.

The Delaunay construction is deliberately brute force: a d-simplex is kept
iff its circumsphere contains no other sample strictly inside.  Near-ties
of the in-sphere predicate are resolved by re-running with a seeded jitter
of the coordinates (the output keeps the original coordinates).  At the
target scale (about a hundred points) this costs seconds and is trivially
auditable against the predicate itself.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

import numpy as np

from . import kernels
from .complexes import SimplicialComplex, build_complex

ZERO_VELOCITY_TOL = 1e-12
PREDICATE_TOL = 1e-9
KMEANS_TOL = 1e-9
KMEANS_MAX_ITER = 100


class ParameterError(ValueError):
    pass


class DegenerateInputError(ValueError):
    pass


class VectorAssignmentError(KeyError):
    pass


@dataclass
class SampleCloud:
    """Positions and velocities of a finite vector-field sample."""

    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        self.velocities = np.asarray(self.velocities, dtype=float)
        if self.positions.shape != self.velocities.shape or self.positions.ndim != 2:
            raise ParameterError("positions and velocities must both be (n, d)")
        if self.positions.shape[1] not in (2, 3):
            raise ParameterError("state dimension must be 2 or 3")
        if not (np.isfinite(self.positions).all() and np.isfinite(self.velocities).all()):
            raise ParameterError("samples must be finite")

    def __len__(self) -> int:
        return len(self.positions)

    @property
    def dim(self) -> int:
        return self.positions.shape[1]


def kmeans(
    cloud: SampleCloud,
    k: int,
    seed: int,
    velocity_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    max_iter: int = KMEANS_MAX_ITER,
) -> SampleCloud:
    """Reduce a sample cloud to k cluster representatives.

    k-means++ seeding followed by Lloyd iterations (at most 100, stopping
    when no centroid moves more than 1e-9).  Every cluster keeps at least
    one member: emptied clusters steal the point currently farthest from
    its assigned centroid.  Representative velocity is the member mean, or
    ``velocity_fn(centroids)`` when given (e.g. re-evaluating a known ODE).
    """
    n = len(cloud)
    if k < 1 or k > n:
        raise ParameterError(f"need 1 <= k <= {n}, got {k}")
    pts = cloud.positions
    rng = np.random.default_rng(np.random.PCG64(seed))

    centroids = np.empty((k, pts.shape[1]))
    centroids[0] = pts[int(rng.integers(n))]
    d2 = ((pts - centroids[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total > 0.0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(np.argmax(d2))
        centroids[c] = pts[idx]
        d2 = np.minimum(d2, ((pts - centroids[c]) ** 2).sum(axis=1))

    assign = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        dist2 = ((pts[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        assign = np.argmin(dist2, axis=1)
        counts = np.bincount(assign, minlength=k)
        for empty in np.nonzero(counts == 0)[0]:
            movable = counts[assign] > 1
            pick = int(np.argmax(np.where(movable, dist2[np.arange(n), assign], -1.0)))
            counts[assign[pick]] -= 1
            assign[pick] = empty
            counts[empty] += 1
        new_centroids = np.empty_like(centroids)
        for c in range(k):
            new_centroids[c] = pts[assign == c].mean(axis=0)
        move = np.abs(new_centroids - centroids).max()
        centroids = new_centroids
        if move < KMEANS_TOL:
            break

    if velocity_fn is not None:
        vel = np.asarray(velocity_fn(centroids), dtype=float)
    else:
        vel = np.empty_like(centroids)
        for c in range(k):
            vel[c] = cloud.velocities[assign == c].mean(axis=0)
    return SampleCloud(centroids, vel)


def kmeans_objective(cloud: SampleCloud, representatives: SampleCloud) -> float:
    """Sum of squared distances from each sample to its nearest representative."""
    dist2 = ((cloud.positions[:, None, :] - representatives.positions[None, :, :]) ** 2).sum(axis=2)
    return float(dist2.min(axis=1).sum())


def delaunay(points: np.ndarray, seed: int) -> SimplicialComplex:
    """Brute-force Delaunay complex on 2D or 3D points.

    Keeps every d-simplex whose circumsphere is empty.  Ambiguous
    predicates (within PREDICATE_TOL at the working scale) trigger a
    seeded jitter of magnitude growing from 1e-9 of the bounding box, and
    the sweep re-runs on the jittered copy; output vertices keep the input
    indices and original coordinates.
    """
    pts = np.ascontiguousarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] not in (2, 3):
        raise ParameterError("points must be (n, 2) or (n, 3)")
    n, d = pts.shape
    if n < d + 1:
        raise DegenerateInputError(f"need at least {d + 1} points in {d}D")
    centered = pts - pts.mean(axis=0)
    if np.linalg.matrix_rank(centered, tol=1e-12 * max(1.0, np.abs(pts).max())) < d:
        raise DegenerateInputError("points are collinear/coplanar")

    diag = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
    sweep = kernels.delaunay_candidates_2d if d == 2 else kernels.delaunay_candidates_3d

    simplices = None
    for attempt in range(9):
        if attempt == 0:
            work = pts
        else:
            rng = np.random.default_rng(np.random.PCG64([seed, attempt]))
            eps = PREDICATE_TOL * diag * 4.0**attempt
            work = np.ascontiguousarray(pts + (rng.random(pts.shape) - 0.5) * 2.0 * eps)
        cand, ambiguous = sweep(work, PREDICATE_TOL)
        if not ambiguous:
            simplices = cand
            break
    if simplices is None:
        raise DegenerateInputError("degeneracies persisted through perturbation rounds")
    if len(simplices) == 0:
        raise DegenerateInputError("no valid simplex passed the empty-circumsphere test")
    return build_complex(
        [tuple(int(v) for v in row) for row in simplices],
        coords={i: pts[i] for i in range(n)},
    )


@dataclass
class VectorAssignment:
    """Per-simplex vectors V and barycenters b, aligned with handles."""

    complex: SimplicialComplex
    vectors: np.ndarray
    barycenters: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def assign_vectors(
    K: SimplicialComplex, vertex_vectors: Mapping[int, np.ndarray] | np.ndarray
) -> VectorAssignment:
    """Extend vertex vectors to all simplices by averaging over vertices.

    Barycenters come from the complex's geometric embedding; missing
    vertex vectors or a missing embedding raise VectorAssignmentError.
    """
    if K.coords is None:
        raise VectorAssignmentError("complex has no geometric embedding")
    if isinstance(vertex_vectors, np.ndarray):
        vertex_vectors = {i: vertex_vectors[i] for i in range(len(vertex_vectors))}
    d = len(next(iter(K.coords.values())))
    vec = np.zeros((len(K), d))
    bary = np.zeros((len(K), d))
    for h, s in enumerate(K.simplices):
        for v in s:
            if v not in vertex_vectors:
                raise VectorAssignmentError(f"no vector for vertex {v}")
            if v not in K.coords:
                raise VectorAssignmentError(f"no coordinates for vertex {v}")
        vec[h] = np.mean([np.asarray(vertex_vectors[v], dtype=float) for v in s], axis=0)
        bary[h] = np.mean([K.coords[v] for v in s], axis=0)
    return VectorAssignment(K, vec, bary)


def w_map(assignment: VectorAssignment, s: int, t: int) -> np.ndarray:
    """Barycenter displacement W(sigma, tau) = b(tau) - b(sigma)."""
    if s == t:
        raise ValueError("W is only defined for distinct simplices")
    return assignment.barycenters[t] - assignment.barycenters[s]


# ---------------------------------------------------------------------------
# Dataset files: CSV with columns x1..xd,v1..vd, or JSON [{"x": [...], "v": [...]}]
# ---------------------------------------------------------------------------


def save_samples(cloud: SampleCloud, path) -> None:
    path = str(path)
    if path.endswith(".json"):
        data = [
            {"x": [float(x) for x in p], "v": [float(v) for v in w]}
            for p, w in zip(cloud.positions, cloud.velocities)
        ]
        with open(path, "w") as fh:
            json.dump(data, fh)
            fh.write("\n")
        return
    d = cloud.dim
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i + 1}" for i in range(d)] + [f"v{i + 1}" for i in range(d)])
        for p, v in zip(cloud.positions, cloud.velocities):
            writer.writerow([repr(float(x)) for x in p] + [repr(float(x)) for x in v])


def load_samples(path) -> SampleCloud:
    path = str(path)
    if path.endswith(".json"):
        with open(path) as fh:
            data = json.load(fh)
        pos = np.array([row["x"] for row in data], dtype=float)
        vel = np.array([row["v"] for row in data], dtype=float)
        return SampleCloud(pos, vel)
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                rows.append([float(x) for x in row])
            except ValueError:
                continue  # header
    arr = np.array(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] % 2:
        raise ParameterError("dataset must have 2d columns (x1..xd, v1..vd)")
    d = arr.shape[1] // 2
    return SampleCloud(arr[:, :d], arr[:, d:])
