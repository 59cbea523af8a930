import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mvfield.complexes import build_complex


@pytest.fixture
def triangle():
    return build_complex([[0, 1, 2]])


@pytest.fixture
def two_triangles():
    return build_complex([[0, 1, 2], [1, 2, 3]])


@pytest.fixture
def tetra():
    return build_complex([[0, 1, 2, 3]])


@pytest.fixture
def edge_path():
    """Path of 3 edges on 4 vertices."""
    return build_complex([[0, 1], [1, 2], [2, 3]])


def annulus_complex():
    """Triangulated annulus: outer triangle 0,1,2; inner triangle 3,4,5."""
    return build_complex(
        [[0, 1, 3], [1, 3, 4], [1, 2, 4], [2, 4, 5], [0, 2, 5], [0, 3, 5]]
    )


@pytest.fixture
def annulus():
    return annulus_complex()


def fig_nonconvex_fixture():
    """Complex on 4 vertices with three triangles and the 10-simplex set
    (containing [1] and [1,3,4] but not [1,3]) that fails convexity."""
    K = build_complex([[1, 2, 4], [2, 3, 4], [1, 3, 4]])
    names = [
        (1,), (1, 2), (1, 4), (1, 2, 4), (2,), (2, 4), (2, 3), (2, 3, 4),
        (3, 4), (1, 3, 4),
    ]
    part = frozenset(K.handle(s) for s in names)
    return K, part


def seeded_delaunay(seed, n_points, box=4.0):
    from mvfield.geometry import delaunay

    rng = np.random.default_rng(np.random.PCG64([98217, seed]))
    pts = rng.random((n_points, 2)) * 2 * box - box
    return delaunay(pts, seed=seed), pts
