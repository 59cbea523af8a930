"""Bounded-variable primal simplex on a dense tableau.

Solves  min c.x  s.t.  A_eq x = b_eq,  A_le x <= b_le,  l <= x <= u.

Slack columns turn the inequalities into equalities; nonbasic variables
rest at a finite bound.  Phase 1 minimizes artificial variables unless the
caller supplies a crash basis (one structural column per equality row,
each appearing in exactly that one equality row) that is feasible at the
current bounds, in which case the basis inverse has the closed form
[[I, 0], [-Q, I]] and phase 1 is skipped entirely.

Entering variable: most-negative reduced cost, switching to Bland's rule
while the objective stalls (anti-cycling) and back once it moves again.
The objective is non-increasing at every pivot.  A final residual check
against the original rows triggers refactorization from scratch if the
tableau drifted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

AT_LOWER, AT_UPPER, BASIC = 0, 1, 2

TOL_OPT = 1e-9
TOL_PIVOT = 1e-9
TOL_FEAS = 1e-7
TOL_BOUND = 1e-9


class LpNumericalError(RuntimeError):
    pass


@dataclass
class LpSolution:
    x: np.ndarray
    objective: float
    status: str  # optimal | infeasible | iteration-limit | unbounded
    iterations: int


def dense_rows(rows, rhs, n_struct):
    """Sparse rows [(col, coef), ...] with rhs -> dense (A, b)."""
    A = np.zeros((len(rows), n_struct))
    for i, row in enumerate(rows):
        for j, coef in row:
            A[i, j] += coef
    return A, np.asarray(rhs, dtype=float)


class _Tableau:
    def __init__(self, A, b, lower, upper, n_struct):
        self.m = A.shape[0]
        self.ncols = A.shape[1]
        self.n_struct = n_struct
        self.A = A  # original column matrix incl. slacks/artificials
        self.b = b
        self.lower = lower
        self.upper = upper
        self.tab = None  # (m+1, ncols): B^-1 A stacked with reduced costs
        self.xB = None
        self.bas = None
        self.stat = None
        self.obj = 0.0
        self.iterations = 0

    # -- state assembly ----------------------------------------------------

    def nonbasic_values(self):
        x = np.where(self.stat == AT_UPPER, self.upper, self.lower)
        x[self.stat == BASIC] = 0.0
        return x

    def full_x(self):
        x = self.nonbasic_values()
        x[self.bas] = self.xB
        return x

    def set_costs(self, c):
        """Recompute the reduced-cost row and objective for new costs."""
        self.c = c
        redc = c - c[self.bas] @ self.tab[: self.m]
        redc[self.bas] = 0.0
        self.tab[self.m] = redc
        self.obj = float(c @ self.full_x())

    def refactor(self):
        """Rebuild tableau and basic values from the basis columns."""
        B = self.A[:, self.bas]
        try:
            self.tab = np.vstack(
                [np.linalg.solve(B, self.A), np.zeros((1, self.ncols))]
            )
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise LpNumericalError("singular basis") from exc
        xN = self.nonbasic_values()
        self.xB = np.linalg.solve(B, self.b - self.A @ xN)
        self.set_costs(self.c)

    def residual(self):
        if self.m == 0:
            return 0.0
        return float(np.abs(self.A @ self.full_x() - self.b).max())

    # -- simplex core --------------------------------------------------------

    def iterate(self, max_iter, stall_limit):
        m = self.m
        movable = (self.upper - self.lower) > 0.0
        bland = False
        stall = 0
        refactors = 0
        while True:
            if self.iterations >= max_iter:
                return "iteration-limit"
            redc = self.tab[m]
            scores = np.zeros(self.ncols)
            at_lo = self.stat == AT_LOWER
            at_up = self.stat == AT_UPPER
            scores[at_lo] = redc[at_lo]
            scores[at_up] = -redc[at_up]
            scores[~movable] = 0.0
            eligible = scores < -TOL_OPT
            if not eligible.any():
                if self.residual() > TOL_FEAS and refactors < 3:
                    refactors += 1
                    self.refactor()
                    continue
                return "optimal"
            if bland:
                j = int(np.nonzero(eligible)[0][0])
            else:
                j = int(np.argmin(scores))
            direction = 1.0 if self.stat[j] == AT_LOWER else -1.0
            g = direction * self.tab[:m, j]
            lb = self.lower[self.bas]
            ub = self.upper[self.bas]
            down = np.maximum(self.xB - lb, 0.0)
            up = np.maximum(ub - self.xB, 0.0)
            self.iterations += 1
            ratios = np.full(m, np.inf)
            pos = g > TOL_PIVOT
            neg = g < -TOL_PIVOT
            ratios[pos] = down[pos] / g[pos]
            ratios[neg] = up[neg] / (-g[neg])
            t_rows = float(ratios.min()) if m else np.inf
            t_own = self.upper[j] - self.lower[j]
            t = min(t_rows, t_own)
            if not np.isfinite(t):
                return "unbounded"
            prev_obj = self.obj
            self.obj += float(scores[j]) * t
            if t_own <= t_rows:
                self.xB -= g * t_own
                self.stat[j] = AT_UPPER if self.stat[j] == AT_LOWER else AT_LOWER
            else:
                ties = np.nonzero(ratios == t_rows)[0]
                if bland:
                    r = int(ties[np.argmin(self.bas[ties])])
                else:
                    r = int(ties[0])
                leaving = self.bas[r]
                enter_start = self.lower[j] if self.stat[j] == AT_LOWER else self.upper[j]
                self.xB -= g * t
                self.xB[r] = enter_start + direction * t
                self.stat[leaving] = AT_LOWER if g[r] > 0 else AT_UPPER
                self.stat[j] = BASIC
                self.bas[r] = j
                kernels.tableau_pivot(self.tab, r, j)
            if self.obj < prev_obj - 1e-12 * (1.0 + abs(prev_obj)):
                stall = 0
                bland = False
            else:
                stall += 1
                if stall > stall_limit:
                    bland = True


def solve_bounded_lp(
    c,
    lower,
    upper,
    A_eq,
    b_eq,
    A_le,
    b_le,
    crash_cols=None,
    max_iter=None,
) -> LpSolution:
    """Solve the bounded LP; see module docstring.

    All arrays are dense.  ``crash_cols`` maps each equality row to a
    structural column to start basic; it is validated and silently dropped
    when infeasible at the given bounds (branch-and-bound nodes fix
    bounds, which can invalidate the root crash).
    """
    c = np.asarray(c, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    ns = len(c)
    m_eq = len(b_eq)
    m_le = len(b_le)
    m = m_eq + m_le
    if max_iter is None:
        max_iter = 50000 + 10 * m
    stall_limit = max(100, m // 4)

    # Column layout: structurals, then one slack per <= row.
    A = np.zeros((m, ns + m_le))
    if m_eq:
        A[:m_eq, :ns] = A_eq
    if m_le:
        A[m_eq:, :ns] = A_le
        A[m_eq:, ns:] = np.eye(m_le)
    b = np.concatenate([np.asarray(b_eq, dtype=float), np.asarray(b_le, dtype=float)])
    lo = np.concatenate([lower, np.zeros(m_le)])
    hi = np.concatenate([upper, np.full(m_le, np.inf)])
    cost = np.concatenate([c, np.zeros(m_le)])

    if crash_cols is not None and m_eq:
        sol = _try_crash(A, b, lo, hi, cost, ns, m_eq, m_le, crash_cols, max_iter, stall_limit)
        if sol is not None:
            return sol
    return _two_phase(A, b, lo, hi, cost, ns, m_eq, m_le, max_iter, stall_limit)


def _finish(t: _Tableau, status: str, ns: int) -> LpSolution:
    if status == "optimal" and t.residual() > TOL_FEAS:
        raise LpNumericalError(f"optimal claim with residual {t.residual():.2e}")
    x = t.full_x()[:ns]
    obj = float(t.c[:ns] @ x)
    return LpSolution(x=x, objective=obj, status=status, iterations=t.iterations)


def _try_crash(A, b, lo, hi, cost, ns, m_eq, m_le, crash_cols, max_iter, stall_limit):
    crash_cols = np.asarray(crash_cols, dtype=np.int64)
    if len(crash_cols) != m_eq:
        return None
    t = _Tableau(A.copy(), b, lo, hi, ns)
    t.bas = np.concatenate([crash_cols, ns + np.arange(m_le)])
    t.stat = np.full(A.shape[1], AT_LOWER, dtype=np.int8)
    t.stat[t.bas] = BASIC
    # Each crash column must hit exactly its own equality row with coef 1.
    eq_part = A[:m_eq, crash_cols]
    if not np.allclose(eq_part, np.eye(m_eq)):
        return None
    tab = np.vstack([A, np.zeros((1, A.shape[1]))])
    if m_le:
        Q = A[m_eq:, crash_cols]
        tab[m_eq:-1] = A[m_eq:] - Q @ A[:m_eq]
    t.tab = tab
    xN = t.nonbasic_values()
    binv_b = b.copy()
    if m_le:
        binv_b[m_eq:] = b[m_eq:] - Q @ b[:m_eq]
    nz = np.nonzero(xN)[0]
    t.xB = binv_b - t.tab[: t.m, nz] @ xN[nz] if len(nz) else binv_b
    lb = lo[t.bas]
    ub = hi[t.bas]
    if (t.xB < lb - TOL_BOUND).any() or (t.xB > ub + TOL_BOUND).any():
        return None
    t.set_costs(cost)
    status = t.iterate(max_iter, stall_limit)
    return _finish(t, status, ns)


def _two_phase(A, b, lo, hi, cost, ns, m_eq, m_le, max_iter, stall_limit):
    m = m_eq + m_le
    n0 = A.shape[1]
    stat = np.full(n0, AT_LOWER, dtype=np.int8)
    x0 = np.where(stat == AT_UPPER, hi, lo)
    resid = b - A @ x0
    art_rows = list(range(m_eq)) + [m_eq + i for i in range(m_le) if resid[m_eq + i] < 0]
    slack_basic = [m_eq + i for i in range(m_le) if resid[m_eq + i] >= 0]

    n_art = len(art_rows)
    A_ext = np.zeros((m, n0 + n_art))
    A_ext[:, :n0] = A
    bas = np.empty(m, dtype=np.int64)
    for k, i in enumerate(art_rows):
        A_ext[i, n0 + k] = 1.0 if resid[i] >= 0 else -1.0
        bas[i] = n0 + k
    for i in slack_basic:
        bas[i] = ns + (i - m_eq)

    lo_ext = np.concatenate([lo, np.zeros(n_art)])
    hi_ext = np.concatenate([hi, np.full(n_art, np.inf)])
    stat_ext = np.full(n0 + n_art, AT_LOWER, dtype=np.int8)
    stat_ext[bas] = BASIC

    t = _Tableau(A_ext, b, lo_ext, hi_ext, ns)
    t.bas = bas
    t.stat = stat_ext
    t.tab = np.vstack([A_ext.copy(), np.zeros((1, n0 + n_art))])
    # Basis is diagonal (+-1 on artificial rows, 1 on slack rows); invert rows.
    for k, i in enumerate(art_rows):
        if A_ext[i, n0 + k] < 0:
            t.tab[i] = -t.tab[i]
    art_row_set = set(art_rows)
    t.xB = np.empty(m)
    for i in range(m):
        t.xB[i] = abs(resid[i]) if i in art_row_set else resid[i]

    phase1_cost = np.concatenate([np.zeros(n0), np.ones(n_art)])
    t.set_costs(phase1_cost)
    status = t.iterate(max_iter, stall_limit)
    if status != "optimal":
        x = t.full_x()[:ns]
        return LpSolution(x=x, objective=float("nan"), status=status, iterations=t.iterations)
    if t.obj > TOL_FEAS:
        x = t.full_x()[:ns]
        return LpSolution(x=x, objective=float("nan"), status="infeasible", iterations=t.iterations)

    # Phase 2: pin artificials to zero and restore the real costs.
    t.lower[n0:] = 0.0
    t.upper[n0:] = 0.0
    t.set_costs(np.concatenate([cost, np.zeros(n_art)]))
    status = t.iterate(max_iter, stall_limit)
    return _finish(t, status, ns)
