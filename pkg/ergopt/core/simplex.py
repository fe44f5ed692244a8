"""Equality-form LP engine: max/min c.x subject to A x = b, x >= 0.

Two arithmetic modes:
- exact: two-phase tableau simplex over Fractions with Bland's least-index rule
- float: scipy's HiGHS dual simplex with tightened tolerances

Both return primal values, dual values (one per row of A) and the basis.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from ergopt.core.errors import NumericallyUnstable
from ergopt.core.intervals import Number
from ergopt.monitoring import get_collector

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPSolution:
    """Raw result of an equality-form LP."""

    status: str
    mode: str
    x: List[Number] = field(default_factory=list)
    value: Optional[Number] = None
    duals: List[Number] = field(default_factory=list)
    basis: Tuple[int, ...] = ()
    pivots: int = 0


class TableauSimplex:
    """Dense two-phase simplex on a full tableau.

    Artificial columns stay in the tableau through phase 2 (never re-entering)
    so that dual values can be read off their reduced costs.
    """

    def __init__(
        self,
        A: Sequence[Sequence[Number]],
        b: Sequence[Number],
        c: Sequence[Number],
        eps: Number = 0,
        max_pivots: int = 50000,
    ):
        self.m = len(A)
        self.n = len(c)
        self.eps = eps
        self.max_pivots = max_pivots
        self.pivots = 0
        self.c = list(c)
        self.signs = [(-1 if bi < 0 else 1) for bi in b]
        self._A = [list(row) for row in A]
        self._b = list(b)
        self._reset()

    def _reset(self) -> None:
        zero = self.c[0] * 0 if self.c else 0
        one = zero + 1
        self.T: List[List[Number]] = []
        self.rows: List[int] = []
        for i in range(self.m):
            s = self.signs[i]
            art = [zero] * self.m
            art[i] = one
            self.T.append([s * a for a in self._A[i]] + art + [s * self._b[i]])
            self.rows.append(i)
        self.basis = [self.n + i for i in range(self.m)]
        self.zero = zero

    def _pivot(self, r: int, j: int) -> None:
        piv = self.T[r][j]
        row = [x / piv for x in self.T[r]]
        self.T[r] = row
        for i, other in enumerate(self.T):
            if i != r:
                f = other[j]
                if f != 0:
                    self.T[i] = [a - f * p for a, p in zip(other, row)]
        if self.R is not None:
            f = self.R[j]
            if f != 0:
                self.R = [a - f * p for a, p in zip(self.R, row)]
        self.basis[r] = j
        self.pivots += 1
        if self.pivots > self.max_pivots:
            raise NumericallyUnstable(f"simplex exceeded {self.max_pivots} pivots")

    def _price(self, cost: Sequence[Number]) -> None:
        """Reduced-cost row for cost; last entry is minus the objective value."""
        width = self.n + self.m + 1
        R = list(cost) + [self.zero]
        for i, bi in enumerate(self.basis):
            cb = cost[bi]
            if cb != 0:
                row = self.T[i]
                R = [R[j] - cb * row[j] for j in range(width)]
        self.R: Optional[List[Number]] = R

    def _iterate(self) -> str:
        eps = self.eps
        while True:
            entering = next((j for j in range(self.n) if self.R[j] > eps), None)
            if entering is None:
                return "optimal"
            best_row, best_ratio = None, None
            for i, row in enumerate(self.T):
                a = row[entering]
                if a > eps:
                    ratio = row[-1] / a
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and self.basis[i] < self.basis[best_row])
                    ):
                        best_row, best_ratio = i, ratio
            if best_row is None:
                return "unbounded"
            self._pivot(best_row, entering)

    def _drive_out_artificials(self) -> None:
        r = 0
        while r < len(self.T):
            if self.basis[r] >= self.n:
                j = next((j for j in range(self.n) if abs(self.T[r][j]) > self.eps), None)
                if j is None:
                    logger.debug(f"dropping redundant constraint row {self.rows[r]}")
                    del self.T[r]
                    del self.basis[r]
                    del self.rows[r]
                    continue
                self._pivot(r, j)
            r += 1

    def _warm_start(self, warm_basis: Sequence[int]) -> bool:
        self.R = None
        for j in warm_basis:
            if not (0 <= j < self.n):
                return False
            r = next(
                (i for i, row in enumerate(self.T)
                 if self.basis[i] >= self.n and abs(row[j]) > self.eps),
                None,
            )
            if r is None:
                return False
            self._pivot(r, j)
        for i, row in enumerate(self.T):
            if row[-1] < -self.eps:
                return False
            if self.basis[i] >= self.n and abs(row[-1]) > self.eps:
                return False
        return True

    def solve(self, warm_basis: Optional[Sequence[int]] = None) -> LPSolution:
        mode = "exact" if self.eps == 0 else "float"
        warm = False
        if warm_basis:
            warm = self._warm_start(warm_basis)
            if not warm:
                logger.debug("warm basis infeasible for new data; cold start")
                self._reset()

        if not warm:
            phase1 = [self.zero] * self.n + [self.zero - 1] * self.m
            self._price(phase1)
            self._iterate()
            if -self.R[-1] < -self.eps:
                return LPSolution(INFEASIBLE, mode, pivots=self.pivots)

        self.R = None
        self._drive_out_artificials()

        self._price(self.c + [self.zero] * self.m)
        status = self._iterate()
        if status == "unbounded":
            return LPSolution(UNBOUNDED, mode, pivots=self.pivots)

        x = [self.zero] * self.n
        for i, bi in enumerate(self.basis):
            x[bi] = self.T[i][-1]
        duals = [self.zero] * self.m
        for k in range(self.m):
            duals[k] = -self.R[self.n + k] * self.signs[k]
        return LPSolution(
            OPTIMAL,
            mode,
            x=x,
            value=-self.R[-1],
            duals=duals,
            basis=tuple(self.basis),
            pivots=self.pivots,
        )


def _solve_float(A, b, c, tol: float) -> LPSolution:
    A_eq = np.array(A, dtype=float)
    b_eq = np.array(b, dtype=float)
    cost = -np.array(c, dtype=float)
    res = linprog(
        cost,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=(0, None),
        method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status == 2:
        return LPSolution(INFEASIBLE, "float")
    if res.status == 3:
        return LPSolution(UNBOUNDED, "float")
    if res.status != 0:
        raise NumericallyUnstable(f"HiGHS failed: {res.message}", status=res.status)

    x = np.maximum(res.x, 0.0)
    duals = -np.asarray(res.eqlin.marginals, dtype=float)
    value = float(np.dot(c, x))
    residual = float(np.max(np.abs(A_eq @ x - b_eq))) if len(b_eq) else 0.0
    gap = abs(float(np.dot(b_eq, duals)) - value)
    scale = max(1.0, abs(value))
    if residual > tol * 10 or gap > tol * scale:
        raise NumericallyUnstable(
            f"float LP certificate failed: residual={residual:.3e}, duality gap={gap:.3e}",
            residual=residual,
            gap=gap,
        )
    basis = tuple(int(j) for j in np.flatnonzero(x > tol))
    return LPSolution(OPTIMAL, "float", x=[float(v) for v in x], value=value,
                      duals=[float(v) for v in duals], basis=basis)


def solve_equality_lp(
    A: Sequence[Sequence[Number]],
    b: Sequence[Number],
    c: Sequence[Number],
    sense: str = "max",
    mode: str = "exact",
    tol: float = 1e-9,
    max_pivots: int = 50000,
    warm_basis: Optional[Sequence[int]] = None,
) -> LPSolution:
    """Optimize c.x over {A x = b, x >= 0}."""
    if sense not in ("max", "min"):
        raise ValueError(f"sense must be 'max' or 'min', got {sense!r}")
    flip = -1 if sense == "min" else 1

    with get_collector().time_solve(mode) as outcome:
        if mode == "exact":
            Af = [[Fraction(a) for a in row] for row in A]
            bf = [Fraction(v) for v in b]
            cf = [Fraction(v) * flip for v in c]
            solution = TableauSimplex(Af, bf, cf, eps=0, max_pivots=max_pivots).solve(warm_basis)
        else:
            cf = [float(v) * flip for v in c]
            solution = _solve_float(A, b, cf, tol)
        outcome["status"] = solution.status
        outcome["pivots"] = solution.pivots

    if solution.status == OPTIMAL and flip == -1:
        solution.value = -solution.value
        solution.duals = [-y for y in solution.duals]
    return solution


def solve_linear_system(
    A: Sequence[Sequence[Number]], b: Sequence[Number], unique: bool = True
) -> List[Fraction]:
    """Exact Gauss-Jordan solve of a consistent system (free variables set to 0)."""
    rows = [[Fraction(a) for a in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    n = len(rows[0]) - 1
    pivot_cols: List[int] = []
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        p = rows[r][col]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * q for a, q in zip(rows[i], rows[r])]
        pivot_cols.append(col)
        r += 1
    if any(row[-1] != 0 for row in rows[r:]):
        raise ValueError("inconsistent linear system")
    if unique and len(pivot_cols) < n:
        raise ValueError(f"system has {n - len(pivot_cols)} free variables")
    solution = [Fraction(0)] * n
    for i, col in enumerate(pivot_cols):
        solution[col] = rows[i][-1]
    return solution
