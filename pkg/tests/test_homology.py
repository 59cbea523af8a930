import numpy as np
import pytest

from mvfield import kernels
from mvfield.complexes import build_complex, closure
from mvfield.homology import (
    NotLocallyClosedError,
    classify,
    conley_index,
    is_critical,
    periodic_parity,
    relative_betti,
)

from conftest import annulus_complex
from oracles import bitmask_gf2_rank, random_small_complex, relative_betti_reference


class TestGf2Rank:
    @pytest.mark.parametrize("seed", range(10))
    def test_against_bitmask_oracle(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.integers(1, 12)
        n = rng.integers(1, 12)
        mat = rng.integers(0, 2, size=(m, n)).astype(np.uint8)
        assert kernels.gf2_rank(mat) == bitmask_gf2_rank(mat)

    def test_identity(self):
        assert kernels.gf2_rank(np.eye(5, dtype=np.uint8)) == 5

    def test_zero(self):
        assert kernels.gf2_rank(np.zeros((3, 4), dtype=np.uint8)) == 0


class TestRelativeBetti:
    def test_single_vertex(self, triangle):
        assert relative_betti(triangle, [triangle.handle((0,))]) == (1,)

    def test_lone_2_toplex(self, triangle):
        assert relative_betti(triangle, [triangle.handle((0, 1, 2))]) == (0, 0, 1)

    def test_triangle_boundary_circle(self, triangle):
        K = triangle
        A = [h for h in range(len(K)) if K.dims[h] <= 1]
        assert relative_betti(K, A) == (1, 1)

    def test_vertex_edge_pair_trivial(self, triangle):
        K = triangle
        A = [K.handle((0,)), K.handle((0, 1))]
        assert relative_betti(K, A) == (0, 0)
        assert not is_critical(K, A)

    def test_closed_full_simplex_contractible(self, tetra):
        A = closure(tetra, [tetra.toplexes[0]])
        assert relative_betti(tetra, A) == (1, 0, 0, 0)

    def test_half_open_annulus(self, annulus):
        K = annulus
        # all triangles plus the six radial edges: locally closed band
        tris = [h for h in range(len(K)) if K.dims[h] == 2]
        radial = [
            K.handle(e)
            for e in [(0, 3), (1, 3), (1, 4), (2, 4), (2, 5), (0, 5)]
        ]
        assert relative_betti(K, tris + radial) == (0, 1, 1)

    def test_closed_annulus(self, annulus):
        A = list(range(len(annulus)))
        assert relative_betti(annulus, A) == (1, 1, 0)

    def test_lone_edge_in_triangle(self, triangle):
        assert relative_betti(triangle, [triangle.handle((0, 1))]) == (0, 1)

    def test_non_convex_raises_with_witness(self, triangle):
        A = [triangle.handle((0,)), triangle.handle((0, 1, 2))]
        with pytest.raises(NotLocallyClosedError) as err:
            relative_betti(triangle, A)
        assert err.value.witness is not None

    @pytest.mark.parametrize("seed", range(8))
    def test_euler_identity_random_convex(self, seed):
        rng = np.random.default_rng(900 + seed)
        K = random_small_complex(rng)
        for _ in range(10):
            # closures are convex; so are closures minus closures of faces
            h = int(rng.integers(len(K)))
            A = closure(K, [h])
            betti = relative_betti(K, A)
            counts = np.bincount([K.dims[a] for a in A])
            euler_cells = sum((-1) ** k * c for k, c in enumerate(counts))
            euler_betti = sum((-1) ** k * b for k, b in enumerate(betti))
            assert euler_cells == euler_betti

    @pytest.mark.parametrize("seed", range(6))
    def test_against_bitmask_reference(self, seed):
        rng = np.random.default_rng(500 + seed)
        K = random_small_complex(rng)
        h = int(rng.integers(len(K)))
        A = closure(K, [h])
        assert relative_betti(K, A) == relative_betti_reference(K, A)

    def test_relabeling_invariance(self):
        K1 = build_complex([[0, 1, 2], [2, 3]])
        K2 = build_complex([[7, 5, 9], [9, 2]])  # same shape, relabeled
        A1 = closure(K1, [K1.handle((0, 1, 2))])
        A2 = closure(K2, [K2.handle((5, 7, 9))])
        assert relative_betti(K1, A1) == relative_betti(K2, A2)
        assert is_critical(K1, A1) == is_critical(K2, A2)


class TestConleyClassify:
    def test_attractor(self):
        assert classify((1, 0, 0), 2) == "attractor"
        assert classify((1,), 2) == "attractor"

    def test_repeller(self):
        assert classify((0, 0, 1), 2) == "repeller"
        assert classify((0, 0, 0, 1), 3) == "repeller"

    def test_reversal_for_all_dims(self):
        for d in (1, 2, 3):
            vec = [0] * (d + 1)
            vec[0] = 1
            assert classify(tuple(vec), d) == "attractor"
            assert classify(tuple(reversed(vec)), d) == "repeller"

    def test_periodic_candidate(self):
        assert classify((1, 1), 2) == "periodic-orbit-candidate"
        assert classify((1, 1, 0), 2) == "periodic-orbit-candidate"
        assert classify((0, 1, 1), 2) == "periodic-orbit-candidate"

    def test_parity_reporting(self):
        assert periodic_parity((1, 1)) == 0
        assert periodic_parity((0, 1, 1)) == 1
        assert periodic_parity((1, 0, 0)) is None
        assert periodic_parity((0, 0)) is None

    def test_other(self):
        assert classify((2, 0, 0), 2) == "other"
        assert classify((1, 2, 0), 2) == "other"

    def test_conley_index_on_annulus(self):
        K = annulus_complex()
        tris = [h for h in range(len(K)) if K.dims[h] == 2]
        radial = [
            K.handle(e)
            for e in [(0, 3), (1, 3), (1, 4), (2, 4), (2, 5), (0, 5)]
        ]
        idx = conley_index(K, tris + radial)
        assert idx == (0, 1, 1)
        assert classify(idx, 2) == "periodic-orbit-candidate"
