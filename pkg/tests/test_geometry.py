import numpy as np
import pytest

from mvfield.geometry import (
    DegenerateInputError,
    ParameterError,
    SampleCloud,
    VectorAssignmentError,
    assign_vectors,
    delaunay,
    kmeans,
    kmeans_objective,
    load_samples,
    save_samples,
    w_map,
)

from oracles import circumcenter


def grid_cloud(n, d=2, seed=0):
    rng = np.random.default_rng(seed)
    pos = rng.random((n, d)) * 10
    vel = rng.normal(size=(n, d))
    return SampleCloud(pos, vel)


class TestSampleCloud:
    def test_validation(self):
        with pytest.raises(ParameterError):
            SampleCloud(np.zeros((3, 2)), np.zeros((4, 2)))
        with pytest.raises(ParameterError):
            SampleCloud(np.zeros((3, 4)), np.zeros((3, 4)))
        with pytest.raises(ParameterError):
            SampleCloud(np.array([[np.inf, 0.0]]), np.zeros((1, 2)))


class TestKmeans:
    def test_k_equals_n_returns_points(self):
        corners = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        cloud = SampleCloud(corners, corners * 0)
        reps = kmeans(cloud, 4, seed=3)
        assert sorted(map(tuple, reps.positions.tolist())) == sorted(
            map(tuple, corners.tolist())
        )

    def test_parameter_errors(self):
        cloud = grid_cloud(10)
        with pytest.raises(ParameterError):
            kmeans(cloud, 0, seed=0)
        with pytest.raises(ParameterError):
            kmeans(cloud, 11, seed=0)

    def test_two_blobs(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=(50, 2)) * 0.5
        b = rng.normal(size=(50, 2)) * 0.5 + 100.0
        pos = np.vstack([a, b])
        cloud = SampleCloud(pos, np.zeros_like(pos))
        reps = kmeans(cloud, 2, seed=0)
        dists = np.linalg.norm(
            reps.positions[:, None] - np.array([[0, 0], [100, 100]])[None], axis=2
        )
        # one centroid per blob, each much closer to its blob than to the other
        assert dists.min(axis=1).max() < 5.0
        assert set(dists.argmin(axis=1)) == {0, 1}

    def test_every_cluster_nonempty_at_scale(self):
        cloud = grid_cloud(1000, seed=5)
        reps = kmeans(cloud, 100, seed=5)
        assert len(reps) == 100
        d2 = ((cloud.positions[:, None] - reps.positions[None]) ** 2).sum(axis=2)
        counts = np.bincount(d2.argmin(axis=1), minlength=100)
        assert counts.min() >= 1

    def test_objective_non_increasing_in_iterations(self):
        cloud = grid_cloud(300, seed=7)
        objs = [
            kmeans_objective(cloud, kmeans(cloud, 20, seed=7, max_iter=m))
            for m in (1, 2, 4, 8, 16)
        ]
        for a, b in zip(objs, objs[1:]):
            assert b <= a + 1e-9

    def test_deterministic(self):
        cloud = grid_cloud(200, seed=9)
        r1 = kmeans(cloud, 13, seed=42)
        r2 = kmeans(cloud, 13, seed=42)
        assert np.array_equal(r1.positions, r2.positions)
        assert np.array_equal(r1.velocities, r2.velocities)

    def test_velocity_override(self):
        cloud = grid_cloud(50, seed=2)
        reps = kmeans(cloud, 5, seed=2, velocity_fn=lambda c: c * 2.0)
        assert np.array_equal(reps.velocities, reps.positions * 2.0)


class TestDelaunay:
    def test_three_points(self):
        K = delaunay(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), seed=0)
        assert len(K) == 7

    def test_square_tie_break(self):
        K = delaunay(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]), seed=0)
        tris = [s for s in K.simplices if len(s) == 3]
        edges = [s for s in K.simplices if len(s) == 2]
        assert len(tris) == 2
        assert len(edges) == 5

    def test_four_points_3d(self):
        pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
        K = delaunay(pts, seed=0)
        assert len(K.toplexes) == 1
        assert K.simplices[K.toplexes[0]] == (0, 1, 2, 3)

    def test_collinear_error(self):
        with pytest.raises(DegenerateInputError):
            delaunay(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]), seed=0)

    def test_coplanar_error_3d(self):
        pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], dtype=float)
        with pytest.raises(DegenerateInputError):
            delaunay(pts, seed=0)

    def test_too_few_points(self):
        with pytest.raises(DegenerateInputError):
            delaunay(np.array([[0.0, 0.0], [1.0, 0.0]]), seed=0)

    def test_euler_formula_2d(self):
        rng = np.random.default_rng(11)
        pts = rng.random((40, 2)) * 10
        K = delaunay(pts, seed=1)
        v = int((K.dims == 0).sum())
        e = int((K.dims == 1).sum())
        t = int((K.dims == 2).sum())
        assert v - e + t == 1
        assert v == 40

    def test_empty_circumsphere_invariant(self):
        rng = np.random.default_rng(13)
        pts = rng.random((25, 2)) * 4
        K = delaunay(pts, seed=2)
        for t in K.toplexes:
            center, r2 = circumcenter(pts[list(K.simplices[t])])
            d2 = ((pts - center) ** 2).sum(axis=1)
            inside = d2 < r2 - 1e-9
            inside[list(K.simplices[t])] = False
            assert not inside.any()

    def test_empty_circumsphere_invariant_3d(self):
        rng = np.random.default_rng(17)
        pts = rng.random((14, 3)) * 4
        K = delaunay(pts, seed=3)
        assert K.dim == 3
        for t in K.toplexes:
            if len(K.simplices[t]) < 4:
                continue
            center, r2 = circumcenter(pts[list(K.simplices[t])])
            d2 = ((pts - center) ** 2).sum(axis=1)
            inside = d2 < r2 - 1e-9
            inside[list(K.simplices[t])] = False
            assert not inside.any()

    def test_matches_scipy(self):
        from scipy.spatial import Delaunay

        rng = np.random.default_rng(19)
        pts = rng.random((30, 2)) * 7
        K = delaunay(pts, seed=4)
        mine = {s for s in (K.simplices[t] for t in K.toplexes)}
        ref = {tuple(sorted(map(int, s))) for s in Delaunay(pts).simplices}
        assert mine == ref

    def test_deterministic(self):
        rng = np.random.default_rng(23)
        pts = rng.random((20, 2))
        K1 = delaunay(pts, seed=5)
        K2 = delaunay(pts, seed=5)
        assert K1.simplices == K2.simplices


class TestAssignVectors:
    def make(self):
        K = delaunay(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), seed=0)
        vectors = {0: np.array([1.0, 0.0]), 1: np.array([0.0, 1.0]), 2: np.array([0.0, 0.0])}
        return K, assign_vectors(K, vectors)

    def test_vertex_keeps_own_vector(self):
        K, a = self.make()
        assert np.allclose(a.vectors[K.handle((0,))], [1.0, 0.0])

    def test_edge_mean(self):
        K, a = self.make()
        assert np.allclose(a.vectors[K.handle((0, 1))], [0.5, 0.5])

    def test_cancellation_to_zero(self):
        K = delaunay(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), seed=0)
        a = assign_vectors(K, {0: [1.0, 0.0], 1: [-1.0, 0.0], 2: [0.0, 0.0]})
        tri = K.handle((0, 1, 2))
        assert np.allclose(a.vectors[tri], [0.0, 0.0])

    def test_missing_vector_error(self):
        K = delaunay(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), seed=0)
        with pytest.raises(VectorAssignmentError):
            assign_vectors(K, {0: [1.0, 0.0], 1: [0.0, 1.0]})

    def test_w_map_hand_values(self):
        K, a = self.make()
        w = w_map(a, K.handle((0,)), K.handle((0, 1)))
        assert np.allclose(w, [0.5, 0.0])
        w2 = w_map(a, K.handle((0, 1)), K.handle((0, 1, 2)))
        assert np.allclose(w2, [1 / 3 - 1 / 2, 1 / 3 - 0.0])

    def test_w_map_antisymmetry(self):
        K, a = self.make()
        s, t = K.handle((0,)), K.handle((0, 1, 2))
        assert np.allclose(w_map(a, s, t), -w_map(a, t, s))

    def test_w_map_same_simplex_error(self):
        K, a = self.make()
        with pytest.raises(ValueError):
            w_map(a, 0, 0)


class TestSampleFiles:
    def test_csv_round_trip(self, tmp_path):
        cloud = grid_cloud(17, seed=3)
        path = tmp_path / "s.csv"
        save_samples(cloud, path)
        back = load_samples(path)
        assert np.array_equal(back.positions, cloud.positions)
        assert np.array_equal(back.velocities, cloud.velocities)

    def test_json_round_trip(self, tmp_path):
        cloud = grid_cloud(8, seed=4)
        path = tmp_path / "s.json"
        save_samples(cloud, path)
        back = load_samples(path)
        assert np.array_equal(back.positions, cloud.positions)
