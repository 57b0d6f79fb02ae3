"""Embedded-MDP oracle.

Builds the MDP over states s∘A and solves it by plain value iteration or by
exhaustive enumeration. Used only to cross-check compressed-space solvers.
"""

from sas_mdp.embedded.brute_force import enumerate_dl_optimum, enumerate_embedded_optimum
from sas_mdp.embedded.embedded_mdp import (
    EmbeddedMdp,
    EmbeddedSolution,
    build_embedded,
    compress_value,
    embedded_bellman,
    extract_embedded_policy,
    solve_embedded_vi,
)

__all__ = [
    "EmbeddedMdp",
    "EmbeddedSolution",
    "build_embedded",
    "compress_value",
    "embedded_bellman",
    "enumerate_dl_optimum",
    "enumerate_embedded_optimum",
    "extract_embedded_policy",
    "solve_embedded_vi",
]
