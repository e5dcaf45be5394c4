from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Literal, Optional, Tuple

import numpy as np

from sdlab.errors import GeometryInputError, SdlabError

logger = logging.getLogger(__name__)

Status = Literal["optimal", "infeasible", "unbounded"]

DEFAULT_LP_TOL = 1e-10
_PIVOT_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class LPProblem:
    """Equality-form problem ``A x = b, x >= 0`` with optional cost ``c``."""

    a_eq: np.ndarray
    b_eq: np.ndarray
    cost: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        a_eq = np.atleast_2d(np.array(self.a_eq, dtype=float))
        b_eq = np.array(self.b_eq, dtype=float).reshape(-1)
        if a_eq.shape[0] != b_eq.shape[0]:
            raise GeometryInputError(
                f"Constraint matrix has {a_eq.shape[0]} rows but rhs has {b_eq.shape[0]}"
            )
        object.__setattr__(self, "a_eq", a_eq)
        object.__setattr__(self, "b_eq", b_eq)
        if self.cost is not None:
            cost = np.array(self.cost, dtype=float).reshape(-1)
            if cost.shape[0] != a_eq.shape[1]:
                raise GeometryInputError(
                    f"Cost has {cost.shape[0]} entries for {a_eq.shape[1]} variables"
                )
            object.__setattr__(self, "cost", cost)

    @property
    def n_vars(self) -> int:
        return self.a_eq.shape[1]


@dataclass(frozen=True, eq=False)
class LPResult:
    status: Status
    x: Optional[np.ndarray]
    basis: Tuple[int, ...]
    objective: Optional[float]
    # Phase-one optimum: L1 norm of the residual no nonnegative x can remove.
    infeasibility: float
    pivots: int

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


class _Tableau:
    """Dense simplex tableau; the last row holds reduced costs and -objective."""

    def __init__(self, table: np.ndarray, basis: List[int]) -> None:
        self.table = table
        self.basis = basis
        self.pivots = 0

    @property
    def rows(self) -> int:
        return self.table.shape[0] - 1

    def pivot(self, row: int, col: int) -> None:
        table = self.table
        table[row, :] /= table[row, col]
        for other in range(table.shape[0]):
            if other != row and table[other, col] != 0.0:
                table[other, :] -= table[other, col] * table[row, :]
        self.basis[row] = col
        self.pivots += 1

    def entering(self, columns: range) -> int:
        # Bland: lowest-index column with negative reduced cost.
        costs = self.table[-1]
        for col in columns:
            if costs[col] < -_PIVOT_EPS:
                return col
        return -1

    def leaving(self, col: int) -> int:
        best_row = -1
        best_key: Tuple[float, int] = (np.inf, -1)
        rhs = self.table[:-1, -1]
        column = self.table[:-1, col]
        for row in range(self.rows):
            if column[row] > _PIVOT_EPS:
                key = (rhs[row] / column[row], self.basis[row])
                if best_row == -1 or key[0] < best_key[0] - _PIVOT_EPS or (
                    abs(key[0] - best_key[0]) <= _PIVOT_EPS and key[1] < best_key[1]
                ):
                    best_row, best_key = row, key
        return best_row

    def run(self, columns: range, max_pivots: int) -> Status:
        while self.pivots < max_pivots:
            col = self.entering(columns)
            if col == -1:
                return "optimal"
            row = self.leaving(col)
            if row == -1:
                return "unbounded"
            self.pivot(row, col)
        raise SdlabError(f"Simplex method exceeded {max_pivots} pivots")


def solve(problem: LPProblem, tol: float = DEFAULT_LP_TOL) -> LPResult:
    """
    Two-phase dense simplex method with Bland's anti-cycling rule.

    Phase one minimises the sum of artificial variables; a remaining sum above
    ``tol`` reports the problem infeasible. Phase two minimises ``cost`` when
    one is given. The returned ``x`` is a basic feasible solution.
    """
    a_eq = problem.a_eq.copy()
    b_eq = problem.b_eq.copy()
    n_rows, n_vars = a_eq.shape
    flip = b_eq < 0
    a_eq[flip] *= -1.0
    b_eq[flip] *= -1.0

    table = np.zeros((n_rows + 1, n_vars + n_rows + 1))
    table[:n_rows, :n_vars] = a_eq
    table[:n_rows, n_vars:n_vars + n_rows] = np.eye(n_rows)
    table[:n_rows, -1] = b_eq
    table[-1, :n_vars] = -a_eq.sum(axis=0)
    table[-1, -1] = -b_eq.sum()
    tableau = _Tableau(table, list(range(n_vars, n_vars + n_rows)))
    max_pivots = 50 * (n_rows + n_vars + 1)

    tableau.run(range(n_vars), max_pivots)
    infeasibility = max(0.0, -float(tableau.table[-1, -1]))
    if infeasibility > tol:
        logger.debug(
            "LP infeasible rows=%d vars=%d infeasibility=%.3e pivots=%d",
            n_rows,
            n_vars,
            infeasibility,
            tableau.pivots,
        )
        return LPResult("infeasible", None, tuple(tableau.basis), None, infeasibility, tableau.pivots)

    _drive_out_artificials(tableau, n_vars)
    status: Status = "optimal"
    objective: Optional[float] = None
    if problem.cost is not None:
        status = _phase_two(tableau, problem.cost, n_vars, max_pivots)

    x = np.zeros(n_vars)
    for row, var in enumerate(tableau.basis):
        if var < n_vars:
            x[var] = tableau.table[row, -1]
    x[x < 0] = 0.0
    if problem.cost is not None and status == "optimal":
        objective = float(problem.cost @ x)
    logger.debug(
        "LP solved status=%s rows=%d vars=%d pivots=%d",
        status,
        n_rows,
        n_vars,
        tableau.pivots,
    )
    basis = tuple(var for var in tableau.basis if var < n_vars)
    return LPResult(status, x, basis, objective, infeasibility, tableau.pivots)


def _drive_out_artificials(tableau: _Tableau, n_vars: int) -> None:
    table = tableau.table
    for row in range(tableau.rows):
        if tableau.basis[row] < n_vars:
            continue
        candidates = np.flatnonzero(np.abs(table[row, :n_vars]) > _PIVOT_EPS)
        if candidates.size:
            tableau.pivot(row, int(candidates[0]))
        # Otherwise the row is redundant and its artificial stays at zero.
    table[:, n_vars:-1] = 0.0


def _phase_two(tableau: _Tableau, cost: np.ndarray, n_vars: int, max_pivots: int) -> Status:
    table = tableau.table
    table[-1, :] = 0.0
    table[-1, :n_vars] = cost
    for row, var in enumerate(tableau.basis):
        if var < n_vars and cost[var] != 0.0:
            table[-1, :] -= cost[var] * table[row, :]
    return tableau.run(range(n_vars), tableau.pivots + max_pivots)
