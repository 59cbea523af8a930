"""Finite simplicial complexes viewed as finite T0 spaces via the face poset.

A complex stores its simplices as sorted vertex tuples in lexicographic
order; the position of a tuple in that order is its integer *handle*, and
all downstream modules (costs, LP rows, fields, homology) index simplices
by handle.  Closure, mouth and convexity are poset computations: the
closure of a set is everything below it, the mouth is closure minus the
set, and a set is convex (equivalently locally closed) exactly when its
mouth is closed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np


class MalformedSimplexError(ValueError):
    """Raised for vertex lists with duplicates, gaps or bad ids."""


@dataclass(frozen=True)
class Simplex:
    """A single simplex: strictly increasing tuple of non-negative vertex ids."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        vs = tuple(int(v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        if not vs:
            raise MalformedSimplexError("empty vertex list")
        if any(v < 0 for v in vs):
            raise MalformedSimplexError(f"negative vertex id in {vs}")
        if any(a >= b for a, b in zip(vs, vs[1:])):
            raise MalformedSimplexError(f"vertices not strictly increasing: {vs}")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


def _faces(vs: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """All non-empty proper subsets of a vertex tuple."""
    for k in range(1, len(vs)):
        yield from combinations(vs, k)


class SimplicialComplex:
    """Face-closed family of simplices with precomputed facet/cofacet links.

    Attributes
    ----------
    simplices : list of vertex tuples, lexicographically sorted; index in
        this list is the simplex handle.
    facets, cofacets : per handle, the sorted handles of codimension-1
        faces / cofaces.
    toplexes : sorted handles of the maximal simplices.
    coords : optional {vertex id: d-vector} geometric embedding.
    """

    def __init__(self, simplices: Iterable[tuple[int, ...]], coords=None):
        self.simplices: list[tuple[int, ...]] = sorted(set(simplices))
        self.index: dict[tuple[int, ...], int] = {
            s: h for h, s in enumerate(self.simplices)
        }
        self._vsets = [frozenset(s) for s in self.simplices]
        self.dims = np.array([len(s) - 1 for s in self.simplices], dtype=np.int64)
        n = len(self.simplices)
        self.facets: list[list[int]] = [[] for _ in range(n)]
        self.cofacets: list[list[int]] = [[] for _ in range(n)]
        for h, s in enumerate(self.simplices):
            if len(s) == 1:
                continue
            for f in combinations(s, len(s) - 1):
                fh = self.index.get(f)
                if fh is None:
                    raise MalformedSimplexError(f"not closed under faces: missing {f}")
                self.facets[h].append(fh)
                self.cofacets[fh].append(h)
        for h in range(n):
            self.facets[h].sort()
            self.cofacets[h].sort()
        self.toplexes: list[int] = [h for h in range(n) if not self.cofacets[h]]
        self.coords: Optional[dict[int, np.ndarray]] = None
        if coords is not None:
            self.coords = {int(v): np.asarray(x, dtype=float) for v, x in coords.items()}

    @property
    def n_simplices(self) -> int:
        return len(self.simplices)

    @property
    def dim(self) -> int:
        return int(self.dims.max()) if len(self.simplices) else -1

    def __len__(self) -> int:
        return len(self.simplices)

    def handle(self, vertices: Sequence[int]) -> int:
        return self.index[tuple(vertices)]

    def vertices_of(self, handle: int) -> tuple[int, ...]:
        return self.simplices[handle]

    def leq(self, a: int, b: int) -> bool:
        """Face-poset order: a <= b iff vertices(a) is a subset of vertices(b)."""
        return self._vsets[a] <= self._vsets[b]

    def proper_faces(self, handle: int) -> list[int]:
        """Handles of all proper faces, ascending."""
        return sorted(self.index[f] for f in _faces(self.simplices[handle]))

    def vertex_ids(self) -> list[int]:
        return [s[0] for s in self.simplices if len(s) == 1]


def build_complex(raw: Iterable[Sequence[int]], coords=None) -> SimplicialComplex:
    """Face-closure of the given vertex-id lists.

    Raises MalformedSimplexError when a list is empty, has duplicates or
    negative ids.
    """
    closed: set[tuple[int, ...]] = set()
    for item in raw:
        vs = tuple(int(v) for v in item)
        if not vs:
            raise MalformedSimplexError("empty vertex list")
        if len(set(vs)) != len(vs):
            raise MalformedSimplexError(f"duplicate vertex in {vs}")
        if any(v < 0 for v in vs):
            raise MalformedSimplexError(f"negative vertex id in {vs}")
        vs = tuple(sorted(vs))
        closed.add(vs)
        closed.update(_faces(vs))
    return SimplicialComplex(closed, coords=coords)


# ---------------------------------------------------------------------------
# Sets of simplices and poset-topology operations
# ---------------------------------------------------------------------------


def closure(K: SimplicialComplex, handles: Iterable[int]) -> frozenset[int]:
    """All simplices below some member: cl A = {x | x <= a for some a in A}."""
    seen = set(handles)
    stack = list(seen)
    while stack:
        h = stack.pop()
        for f in K.facets[h]:
            if f not in seen:
                seen.add(f)
                stack.append(f)
    return frozenset(seen)


def mouth(K: SimplicialComplex, handles: Iterable[int]) -> frozenset[int]:
    """cl A minus A."""
    hs = frozenset(handles)
    return closure(K, hs) - hs


def is_closed(K: SimplicialComplex, handles: Iterable[int]) -> bool:
    hs = set(handles)
    return all(f in hs for h in hs for f in K.facets[h])


def convexity_witness(
    K: SimplicialComplex, handles: Iterable[int]
) -> Optional[tuple[int, int, int]]:
    """A triple x < y < z with x, z in A but y not, or None when A is convex.

    Convexity is decided by local closedness (the mouth of A is closed);
    the witness is reconstructed from a mouth element whose facet falls
    back into A.
    """
    hs = frozenset(handles)
    mo = closure(K, hs) - hs
    for w in sorted(mo):
        for y in K.facets[w]:
            if y in mo:
                continue
            if y in hs:
                # w is in cl A, so some member above it exists; walk up.
                z = _member_above(K, w, hs)
                return (y, w, z)
    return None


def _member_above(K: SimplicialComplex, h: int, members: frozenset[int]) -> int:
    stack = [h]
    seen = {h}
    while stack:
        cur = stack.pop()
        for c in sorted(K.cofacets[cur]):
            if c in members:
                return c
            if c not in seen:
                seen.add(c)
                stack.append(c)
    raise AssertionError("element of cl A with no member of A above it")


def is_convex(K: SimplicialComplex, handles: Iterable[int]) -> bool:
    """True iff A contains every simplex between two of its members."""
    return convexity_witness(K, handles) is None


@dataclass(frozen=True)
class SimplexSet:
    """A set of simplex handles tied to one complex."""

    complex: SimplicialComplex
    handles: frozenset[int]

    def __post_init__(self):
        n = len(self.complex)
        object.__setattr__(self, "handles", frozenset(int(h) for h in self.handles))
        if any(h < 0 or h >= n for h in self.handles):
            raise ValueError("handle out of range for owning complex")

    def closure(self) -> "SimplexSet":
        return SimplexSet(self.complex, closure(self.complex, self.handles))

    def mouth(self) -> "SimplexSet":
        return SimplexSet(self.complex, mouth(self.complex, self.handles))

    def is_convex(self) -> bool:
        return is_convex(self.complex, self.handles)

    def convexity_witness(self) -> Optional[tuple[int, int, int]]:
        return convexity_witness(self.complex, self.handles)

    def __len__(self) -> int:
        return len(self.handles)

    def __iter__(self):
        return iter(sorted(self.handles))


# ---------------------------------------------------------------------------
# Variable and constraint enumerations for the two optimization models
# ---------------------------------------------------------------------------


def model2_variable_pairs(K: SimplicialComplex) -> list[tuple[int, int]]:
    """All (sigma, tau) with tau a toplex and sigma a proper face of it.

    Order: toplexes ascending, then faces ascending; this order defines the
    Model-2 variable indexing used everywhere downstream.
    """
    pairs = []
    for t in K.toplexes:
        for s in K.proper_faces(t):
            pairs.append((s, t))
    return pairs


def model2_triplets(K: SimplicialComplex) -> list[tuple[int, int, int]]:
    """Triples (sigma_i, sigma_j, tau): tau toplex, sigma_j a proper face,
    sigma_i a facet of sigma_j (dimension gap exactly one)."""
    out = []
    for t in K.toplexes:
        for sj in K.proper_faces(t):
            for si in K.facets[sj]:
                out.append((si, sj, t))
    return out


def model1_variables(K: SimplicialComplex) -> list[tuple[int, int]]:
    """Model-1 variables: loops (sigma, sigma) for every simplex, then all
    strict face pairs (sigma, tau) grouped by tau ascending."""
    out = [(h, h) for h in range(len(K))]
    for t in range(len(K)):
        if K.dims[t] == 0:
            continue
        for s in K.proper_faces(t):
            out.append((s, t))
    return out


def model1_triplets(K: SimplicialComplex) -> list[tuple[int, int, int]]:
    """All strict 3-chains sigma_i < sigma_j < tau over the whole complex."""
    out = []
    for t in range(len(K)):
        if K.dims[t] < 2:
            continue
        for sj in K.proper_faces(t):
            if K.dims[sj] == 0:
                continue
            for si in K.proper_faces(sj):
                out.append((si, sj, t))
    return out


# ---------------------------------------------------------------------------
# JSON interchange: {"simplices": [[ids], ...]}
# ---------------------------------------------------------------------------


def to_json(K: SimplicialComplex) -> dict:
    return {"simplices": [list(s) for s in K.simplices]}


def from_json(data: dict, coords=None) -> SimplicialComplex:
    return build_complex(data["simplices"], coords=coords)


def dump_complex(K: SimplicialComplex, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_json(K), fh, sort_keys=True)
        fh.write("\n")


def load_complex(path) -> SimplicialComplex:
    with open(path) as fh:
        return from_json(json.load(fh))
