"""LP solver for the compressed MDP: greedy separation oracle,
constraint generation and a small dense simplex."""

from sas_mdp.lp.constraint_generation import (
    DlConstraint,
    LpResult,
    LpState,
    separation_oracle,
    solve_lp,
)
from sas_mdp.lp.simplex import SimplexResult, simplex_solve

__all__ = [
    "DlConstraint",
    "LpResult",
    "LpState",
    "SimplexResult",
    "separation_oracle",
    "simplex_solve",
    "solve_lp",
]
