"""Dense two-phase simplex for small relaxed LPs.

``simplex_solve`` minimizes cᵀx subject to Ax ≥ b with x free. It works on
the dual in standard form, max bᵀy s.t. Aᵀy = c, y ≥ 0, which needs no
slack or split variables, and reads x back from the simplex multipliers.
Pivoting follows Bland's rule, so the method cannot cycle.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from sas_mdp.utils.errors import LpInfeasibleError, LpUnboundedError, SimplexCyclingError

logger = logging.getLogger(__name__)

PIVOT_TOLERANCE = 1e-11
FEASIBILITY_TOLERANCE = 1e-9


@dataclass
class SimplexResult:
    """Optimal basic solution.

    Attributes:
        x: Primal solution
        objective: cᵀx
        duals: Optimal multiplier of every constraint row (y ≥ 0)
        pivots: Total pivots over both phases
    """

    x: np.ndarray
    objective: float
    duals: np.ndarray
    pivots: int


class _Tableau:
    """Rows B⁻¹[M | I] with right-hand side B⁻¹c' and the current basis."""

    def __init__(self, matrix: np.ndarray, rhs: np.ndarray):
        rows, cols = matrix.shape
        self.n_structural = cols
        self.body = np.hstack([matrix, np.eye(rows)])
        self.rhs = rhs.astype(float).copy()
        self.basis: List[int] = list(range(cols, cols + rows))
        self.pivots = 0

    def reduced_costs(self, cost: np.ndarray) -> np.ndarray:
        return cost - cost[self.basis] @ self.body

    def pivot(self, row: int, col: int) -> None:
        element = self.body[row, col]
        self.body[row] /= element
        self.rhs[row] /= element
        for i in range(self.body.shape[0]):
            if i != row and self.body[i, col] != 0.0:
                factor = self.body[i, col]
                self.body[i] -= factor * self.body[row]
                self.rhs[i] -= factor * self.rhs[row]
        self.basis[row] = col
        self.pivots += 1

    def ratio_row(self, col: int) -> Optional[int]:
        column = self.body[:, col]
        candidates = np.flatnonzero(column > PIVOT_TOLERANCE)
        if len(candidates) == 0:
            return None
        ratios = self.rhs[candidates] / column[candidates]
        best = ratios.min()
        tied = candidates[ratios <= best + PIVOT_TOLERANCE * max(1.0, abs(best))]
        # Bland: among tied rows leave the smallest basic index
        return int(min(tied, key=lambda i: self.basis[i]))

    def optimize(self, cost: np.ndarray, allowed: int, max_pivots: int) -> bool:
        """Run Bland pivots; False if the objective is unbounded below."""
        while True:
            reduced = self.reduced_costs(cost)[:allowed]
            entering = np.flatnonzero(reduced < -PIVOT_TOLERANCE)
            if len(entering) == 0:
                return True
            col = int(entering[0])
            row = self.ratio_row(col)
            if row is None:
                return False
            if self.pivots >= max_pivots:
                raise SimplexCyclingError(
                    f"Simplex exceeded {max_pivots} pivots", {"pivots": self.pivots}
                )
            self.pivot(row, col)

    def drive_out_artificials(self) -> None:
        for row, var in enumerate(self.basis):
            if var < self.n_structural:
                continue
            candidates = np.flatnonzero(
                np.abs(self.body[row, : self.n_structural]) > PIVOT_TOLERANCE
            )
            if len(candidates):
                self.pivot(row, int(candidates[0]))


def simplex_solve(
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    max_pivots: Optional[int] = None,
) -> SimplexResult:
    """Minimize cᵀx subject to Ax ≥ b, x free.

    Args:
        a: Constraint matrix, shape (p, n)
        b: Right-hand sides, shape (p,)
        c: Objective, shape (n,)
        max_pivots: Pivot cap over both phases; 50·(n + p) by default

    Returns:
        The optimal basic solution

    Raises:
        LpUnboundedError: If cᵀx has no lower bound on the feasible set
        LpInfeasibleError: If no x satisfies Ax ≥ b
        SimplexCyclingError: If the pivot cap is exhausted
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    p, n = a.shape
    max_pivots = max_pivots if max_pivots is not None else 50 * (n + p)

    signs = np.where(c < 0.0, -1.0, 1.0)
    tableau = _Tableau(signs[:, None] * a.T, signs * c)

    phase_one = np.concatenate([np.zeros(p), np.ones(n)])
    tableau.optimize(phase_one, allowed=p + n, max_pivots=max_pivots)
    infeasibility = float(tableau.rhs[np.array(tableau.basis) >= p].sum())
    if infeasibility > FEASIBILITY_TOLERANCE * max(1.0, float(np.abs(c).max(initial=0.0))):
        # Aᵀy = c has no nonnegative solution, so cᵀx decreases along some recession ray
        raise LpUnboundedError(
            "Relaxed LP is unbounded", {"dual_infeasibility": infeasibility}
        )
    tableau.drive_out_artificials()

    phase_two = np.concatenate([-b, np.zeros(n)])
    if not tableau.optimize(phase_two, allowed=p, max_pivots=max_pivots):
        raise LpInfeasibleError("Relaxed LP is infeasible", {"constraints": p})

    duals = np.zeros(p)
    for row, var in enumerate(tableau.basis):
        if var < p:
            duals[var] = tableau.rhs[row]
    basic_rows = [var for var in tableau.basis if var < p]
    if len(basic_rows) == n:
        x = np.linalg.solve(a[basic_rows], b[basic_rows])
    else:
        x = signs * tableau.reduced_costs(phase_two)[p:]
    logger.debug(f"Simplex solved {p} x {n} LP in {tableau.pivots} pivots")
    return SimplexResult(x=x, objective=float(c @ x), duals=duals, pivots=tableau.pivots)
