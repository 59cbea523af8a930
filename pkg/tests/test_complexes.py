import numpy as np
import pytest

from mvfield.complexes import (
    MalformedSimplexError,
    Simplex,
    SimplexSet,
    build_complex,
    closure,
    convexity_witness,
    from_json,
    is_convex,
    model1_triplets,
    model1_variables,
    model2_triplets,
    model2_variable_pairs,
    mouth,
    to_json,
)

from conftest import fig_nonconvex_fixture, seeded_delaunay
from oracles import brute_closure, brute_is_convex, count_strict_3chains, random_small_complex


class TestSimplex:
    def test_valid(self):
        s = Simplex((0, 2, 5))
        assert s.dim == 2

    @pytest.mark.parametrize("verts", [(), (1, 1), (3, 2), (-1, 0)])
    def test_invalid(self, verts):
        with pytest.raises(MalformedSimplexError):
            Simplex(verts)


class TestBuild:
    def test_one_triangle(self, triangle):
        assert len(triangle) == 7
        assert len(triangle.toplexes) == 1

    def test_isolated_vertices(self):
        K = build_complex([[0], [1]])
        assert len(K) == 2
        assert len(K.toplexes) == 2

    def test_two_triangles_share_edge(self, two_triangles):
        # 4 vertices + 5 edges + 2 triangles
        assert len(two_triangles) == 11
        assert len(two_triangles.toplexes) == 2

    def test_duplicate_vertex_rejected(self):
        with pytest.raises(MalformedSimplexError):
            build_complex([[0, 0, 1]])

    def test_negative_vertex_rejected(self):
        with pytest.raises(MalformedSimplexError):
            build_complex([[-1, 2]])

    def test_lexicographic_handle_order(self, triangle):
        assert triangle.simplices == sorted(triangle.simplices)

    def test_every_simplex_below_a_toplex(self, two_triangles):
        K = two_triangles
        for h in range(len(K)):
            assert any(K.leq(h, t) for t in K.toplexes)

    def test_toplexes_have_no_cofacets(self, two_triangles):
        K = two_triangles
        for t in K.toplexes:
            assert not K.cofacets[t]


class TestClosureMouthConvexity:
    def test_closure_of_toplex(self, triangle):
        t = triangle.toplexes[0]
        assert closure(triangle, [t]) == frozenset(range(7))

    def test_closure_empty(self, triangle):
        assert closure(triangle, []) == frozenset()

    def test_closure_edge_plus_vertex(self, triangle):
        K = triangle
        A = [K.handle((0, 1)), K.handle((2,))]
        expected = {K.handle(s) for s in [(0,), (1,), (0, 1), (2,)]}
        assert closure(K, A) == frozenset(expected)

    def test_mouth_of_vertex_empty(self, triangle):
        assert mouth(triangle, [triangle.handle((0,))]) == frozenset()

    def test_mouth_of_toplex(self, triangle):
        t = triangle.toplexes[0]
        assert mouth(triangle, [t]) == frozenset(range(7)) - {t}

    def test_mouth_of_closed_edge_set(self, triangle):
        K = triangle
        A = [K.handle((0, 1)), K.handle((0,)), K.handle((1,))]
        assert mouth(K, A) == frozenset()

    def test_vertex_plus_incident_edge_convex(self, triangle):
        K = triangle
        assert is_convex(K, [K.handle((0,)), K.handle((0, 1))])

    def test_vertex_plus_triangle_not_convex(self, triangle):
        K = triangle
        A = [K.handle((0,)), K.handle((0, 1, 2))]
        w = convexity_witness(K, A)
        assert w is not None
        x, y, z = w
        assert x == K.handle((0,))
        assert z == K.handle((0, 1, 2))
        assert K.dims[y] == 1

    def test_published_nonconvex_set(self):
        K, part = fig_nonconvex_fixture()
        w = convexity_witness(K, part)
        assert w is not None
        # the missing middle simplex for members [1] and [1,3,4] is [1,3]
        assert not is_convex(K, part)
        assert K.handle((1, 3)) not in part

    def test_singletons_convex(self, two_triangles):
        for h in range(len(two_triangles)):
            assert is_convex(two_triangles, [h])

    @pytest.mark.parametrize("seed", range(8))
    def test_against_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        K = random_small_complex(rng)
        for _ in range(12):
            size = int(rng.integers(1, max(2, len(K) // 2)))
            A = frozenset(rng.choice(len(K), size=size, replace=False).tolist())
            assert closure(K, A) == brute_closure(K, A)
            assert is_convex(K, A) == brute_is_convex(K, A)
            w = convexity_witness(K, A)
            if w is not None:
                x, y, z = w
                assert x in A and z in A and y not in A
                assert K.leq(x, y) and K.leq(y, z)

    @pytest.mark.parametrize("seed", range(5))
    def test_closure_idempotent_monotone(self, seed):
        rng = np.random.default_rng(100 + seed)
        K = random_small_complex(rng)
        a = frozenset(rng.choice(len(K), size=min(3, len(K)), replace=False).tolist())
        b = a | {int(rng.integers(len(K)))}
        ca = closure(K, a)
        assert closure(K, ca) == ca
        assert ca <= closure(K, b)

    @pytest.mark.parametrize("seed", range(5))
    def test_convex_iff_mouth_closed(self, seed):
        from mvfield.complexes import is_closed

        rng = np.random.default_rng(300 + seed)
        K = random_small_complex(rng)
        for _ in range(10):
            size = int(rng.integers(1, len(K) + 1))
            A = frozenset(rng.choice(len(K), size=size, replace=False).tolist())
            assert is_convex(K, A) == is_closed(K, mouth(K, A))


class TestEnumerations:
    def test_triangle_pairs(self, triangle):
        assert len(model2_variable_pairs(triangle)) == 6

    def test_two_triangle_pairs(self, two_triangles):
        # each triangle contributes its 6 proper faces once
        pairs = model2_variable_pairs(two_triangles)
        assert len(pairs) == 12
        assert len(set(pairs)) == 12

    def test_isolated_vertex_pairs(self):
        K = build_complex([[0]])
        assert model2_variable_pairs(K) == []
        assert model2_triplets(K) == []

    def test_pair_count_formula_pure(self, triangle, two_triangles, tetra):
        for K in (triangle, two_triangles, tetra):
            expected = sum(2 ** (int(K.dims[t]) + 1) - 2 for t in K.toplexes)
            assert len(model2_variable_pairs(K)) == expected

    def test_pair_count_formula_delaunay(self):
        K, _ = seeded_delaunay(4, 18)
        expected = sum(2 ** (int(K.dims[t]) + 1) - 2 for t in K.toplexes)
        assert len(model2_variable_pairs(K)) == expected

    def test_triangle_triplets(self, triangle):
        trips = model2_triplets(triangle)
        assert len(trips) == 6
        for si, sj, t in trips:
            assert triangle.dims[si] + 1 == triangle.dims[sj]
            assert triangle.leq(si, sj) and triangle.leq(sj, t)

    def test_tetra_triplets(self, tetra):
        # 12 vertex-edge + 12 edge-triangle chains under the single toplex
        assert len(model2_triplets(tetra)) == 24

    def test_disjoint_edges_no_triplets(self):
        K = build_complex([[0, 1], [2, 3]])
        assert model2_triplets(K) == []

    def test_model1_triplets_edge(self):
        K = build_complex([[0, 1]])
        assert model1_triplets(K) == []

    def test_model1_triplets_triangle(self, triangle):
        assert len(model1_triplets(triangle)) == 6

    def test_model1_triplets_tetra_matches_chain_count(self, tetra):
        # strict 3-chains in the face poset, counted by brute force
        assert len(model1_triplets(tetra)) == count_strict_3chains(tetra)
        assert len(model1_triplets(tetra)) == 60

    def test_model1_variables_edge(self):
        K = build_complex([[0, 1]])
        # 3 loops + (vertex, edge) pairs
        assert len(model1_variables(K)) == 5

    def test_enumeration_deterministic(self, two_triangles):
        K2 = build_complex([[0, 1, 2], [1, 2, 3]])
        assert model2_variable_pairs(two_triangles) == model2_variable_pairs(K2)
        assert model2_triplets(two_triangles) == model2_triplets(K2)
        assert model1_variables(two_triangles) == model1_variables(K2)


class TestSimplexSet:
    def test_api(self, triangle):
        A = SimplexSet(triangle, frozenset([triangle.toplexes[0]]))
        assert len(A.closure()) == 7
        assert len(A.mouth()) == 6
        assert A.is_convex()
        assert A.convexity_witness() is None

    def test_out_of_range(self, triangle):
        with pytest.raises(ValueError):
            SimplexSet(triangle, frozenset([99]))


class TestJson:
    def test_round_trip(self, two_triangles):
        K2 = from_json(to_json(two_triangles))
        assert K2.simplices == two_triangles.simplices

    def test_faces_may_be_omitted(self):
        K = from_json({"simplices": [[0, 1, 2]]})
        assert len(K) == 7
