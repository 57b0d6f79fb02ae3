"""Solvers and learning tools for MDPs with stochastic action sets.

This package implements exact compressed-space solvers (value iteration,
policy iteration, LP by constraint generation), SAS-Q-learning, and a
brute-force embedded-MDP oracle, together with a CLI and an MCP server.
"""

__version__ = "0.1.0"
