import numpy as np
import pytest
from scipy.optimize import linprog

from mvfield import lp


def random_problem(rng):
    n = int(rng.integers(2, 10))
    m_eq = int(rng.integers(0, 4))
    m_le = int(rng.integers(0, 6))
    c = rng.normal(size=n)
    A_eq = rng.integers(-2, 3, size=(m_eq, n)).astype(float)
    b_eq = rng.normal(size=m_eq)
    A_le = rng.integers(-2, 3, size=(m_le, n)).astype(float)
    b_le = rng.normal(size=m_le)
    return c, A_eq, b_eq, A_le, b_le


def scipy_reference(c, A_eq, b_eq, A_le, b_le, bounds):
    return linprog(
        c,
        A_ub=A_le if len(b_le) else None,
        b_ub=b_le if len(b_le) else None,
        A_eq=A_eq if len(b_eq) else None,
        b_eq=b_eq if len(b_eq) else None,
        bounds=bounds,
        method="highs",
    )


class TestToyProblems:
    def test_smaller_cost_wins(self):
        res = lp.solve_bounded_lp(
            np.array([0.2, 0.7]), np.zeros(2), np.ones(2),
            np.array([[1.0, 1.0]]), np.array([1.0]), np.zeros((0, 2)), np.zeros(0),
        )
        assert res.status == "optimal"
        assert res.objective == pytest.approx(0.2, abs=1e-9)
        assert np.allclose(res.x, [1.0, 0.0])

    def test_infeasible(self):
        # z1 = 1 with upper bound 0
        res = lp.solve_bounded_lp(
            np.array([0.0]), np.zeros(1), np.zeros(1),
            np.array([[1.0]]), np.array([1.0]), np.zeros((0, 1)), np.zeros(0),
        )
        assert res.status == "infeasible"

    def test_upper_bounds_respected(self):
        # maximize x (min -x) subject to x <= 0.25 via bound
        res = lp.solve_bounded_lp(
            np.array([-1.0]), np.zeros(1), np.array([0.25]),
            np.zeros((0, 1)), np.zeros(0), np.zeros((0, 1)), np.zeros(0),
        )
        assert res.objective == pytest.approx(-0.25)

    def test_negative_rhs_le_rows(self):
        # -x <= -0.5 means x >= 0.5 (phase 1 must fire)
        res = lp.solve_bounded_lp(
            np.array([1.0]), np.zeros(1), np.ones(1),
            np.zeros((0, 1)), np.zeros(0), np.array([[-1.0]]), np.array([-0.5]),
        )
        assert res.status == "optimal"
        assert res.objective == pytest.approx(0.5, abs=1e-9)

    def test_iteration_limit_status(self):
        rng = np.random.default_rng(0)
        c, A_eq, b_eq, A_le, b_le = random_problem(rng)
        res = lp.solve_bounded_lp(
            c, np.zeros(len(c)), np.ones(len(c)), A_eq, b_eq, A_le, b_le, max_iter=1
        )
        assert res.status in ("iteration-limit", "optimal", "infeasible")


class TestAgainstScipy:
    @pytest.mark.parametrize("seed", range(12))
    def test_random_bounded_problems(self, seed):
        rng = np.random.default_rng(seed * 7919)
        for _ in range(30):
            c, A_eq, b_eq, A_le, b_le = random_problem(rng)
            n = len(c)
            mine = lp.solve_bounded_lp(c, np.zeros(n), np.ones(n), A_eq, b_eq, A_le, b_le)
            ref = scipy_reference(c, A_eq, b_eq, A_le, b_le, [(0, 1)] * n)
            if ref.status == 2:
                assert mine.status == "infeasible"
            else:
                assert mine.status == "optimal"
                assert mine.objective == pytest.approx(ref.fun, abs=1e-7)
                assert (mine.x >= -1e-9).all() and (mine.x <= 1 + 1e-9).all()

    @pytest.mark.parametrize("seed", range(4))
    def test_fixed_variable_bounds(self, seed):
        rng = np.random.default_rng(1000 + seed)
        for _ in range(20):
            c, A_eq, b_eq, A_le, b_le = random_problem(rng)
            n = len(c)
            lower = np.zeros(n)
            upper = np.ones(n)
            fix = rng.integers(0, n)
            value = float(rng.integers(0, 2))
            lower[fix] = upper[fix] = value
            mine = lp.solve_bounded_lp(c, lower, upper, A_eq, b_eq, A_le, b_le)
            bounds = [(lower[j], upper[j]) for j in range(n)]
            ref = scipy_reference(c, A_eq, b_eq, A_le, b_le, bounds)
            if ref.status == 2:
                assert mine.status == "infeasible"
            else:
                assert mine.status == "optimal"
                assert mine.objective == pytest.approx(ref.fun, abs=1e-7)
                assert mine.x[fix] == pytest.approx(value, abs=1e-9)


class TestCrashBasis:
    def test_model2_crash_matches_two_phase(self):
        from mvfield.complexes import build_complex
        from mvfield.cost import model2_costs
        from mvfield.geometry import assign_vectors, delaunay
        from mvfield import milp
        from mvfield.milp import _crash_cols, _dense_data

        rng = np.random.default_rng(31)
        pts = rng.random((14, 2)) * 3
        K = delaunay(pts, seed=0)
        a = assign_vectors(K, rng.normal(size=(14, 2)))
        inst = milp.build_model2(K, model2_costs(K, a))
        A_eq, b_eq, A_le, b_le = _dense_data(inst)
        n = inst.n_vars
        with_crash = lp.solve_bounded_lp(
            inst.costs, np.zeros(n), np.ones(n), A_eq, b_eq, A_le, b_le,
            crash_cols=_crash_cols(inst),
        )
        plain = lp.solve_bounded_lp(
            inst.costs, np.zeros(n), np.ones(n), A_eq, b_eq, A_le, b_le
        )
        assert with_crash.status == plain.status == "optimal"
        assert with_crash.objective == pytest.approx(plain.objective, abs=1e-8)

    def test_invalid_crash_falls_back(self):
        # crash columns not forming an identity on the eq rows are dropped
        res = lp.solve_bounded_lp(
            np.array([0.2, 0.7]), np.zeros(2), np.ones(2),
            np.array([[1.0, 1.0]]), np.array([1.0]), np.zeros((0, 2)), np.zeros(0),
            crash_cols=np.array([1]),
        )
        assert res.status == "optimal"
        assert res.objective == pytest.approx(0.2, abs=1e-9)
