"""Report and request models shared by the CLI and the MCP tools."""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

SolverName = Literal["vi", "pi", "lp", "embedded"]


class StateReport(BaseModel):
    """Solution at one state."""

    state: str = Field(..., description="State name")
    value: float = Field(..., description="Optimal compressed value V*(s)")
    decision_list: List[str] = Field(..., description="Optimal DL, highest priority first")


class SolveReport(BaseModel):
    """Outcome of solving one instance."""

    solver: SolverName = Field(..., description="Solver that produced the values")
    n_states: int = Field(..., description="Number of states")
    n_actions: int = Field(..., description="Number of base actions")
    states: List[StateReport] = Field(..., description="Per-state values and DLs")
    iterations: Optional[int] = Field(None, description="Backups, evaluations or LP rounds")
    constraints: Optional[int] = Field(None, description="Generated LP constraints")
    wall_time: float = Field(..., description="Solver wall time in seconds")
    oracle_max_diff: Optional[float] = Field(
        None, description="max |ΔV| against the embedded-MDP oracle"
    )
    value_bound: float = Field(
        ..., description="max|r| / (1 − γ), a bound on every |V(s)|"
    )


class LearnReport(BaseModel):
    """Outcome of SAS-Q-learning."""

    steps: int = Field(..., description="Environment steps taken")
    episodes: int = Field(..., description="Episodes run")
    q_values: List[List[float]] = Field(..., description="Learned Q-table")
    decision_lists: List[List[str]] = Field(..., description="Greedy DL of the learned Q")
    compressed_values: Optional[List[float]] = Field(
        None, description="E_A max_{k∈A} Q(s,k); absent for sample-only availability"
    )
    final_mean_return: float = Field(..., description="Trailing mean episode return")


class SolveRequest(BaseModel):
    """Request for the solve_instance tool."""

    instance: Dict[str, Any] = Field(..., description="Instance document")
    solver: SolverName = Field("vi", description="Solver name")
    eps: Optional[float] = Field(None, gt=0, description="Value-iteration precision")
    tol: Optional[float] = Field(None, gt=0, description="LP violation tolerance")
    oracle: bool = Field(False, description="Cross-check against the embedded oracle")


class IterationBoundRequest(BaseModel):
    """Request for the iteration_bound tool."""

    instance: Dict[str, Any] = Field(..., description="Instance document (PDA)")
    delta: int = Field(..., ge=1, description="Common denominator of all instance numbers")


class LearnRequest(BaseModel):
    """Request for the learn_q tool."""

    instance: Dict[str, Any] = Field(..., description="Instance document")
    steps: int = Field(200_000, description="Environment step budget")
    horizon: int = Field(100, ge=1, description="Steps per episode")
    seed: Optional[int] = Field(None, ge=0, description="Master seed")


class CurveRequest(BaseModel):
    """Request for the two_state_curve tool."""

    p_grid: Optional[List[float]] = Field(None, description="Availability probabilities of Up")
    gamma: float = Field(0.9, ge=0, lt=1, description="Discount factor")


class RoutingRequest(BaseModel):
    """Request for the routing_comparison tool."""

    p_grid: List[float] = Field([0.05, 0.1, 0.2, 0.4, 0.8, 1.0], description="Bridge probabilities")
    nodes: int = Field(3, ge=2, description="Columns per bank")
    edge_avail: float = Field(0.5, ge=0, le=1, description="Availability of regular roads")
    noop_cost: float = Field(1.0, gt=0, description="Cost of waiting one step")
    seed: int = Field(0, ge=0, description="Seed of the road lengths")
    bridge: bool = Field(True, description="Whether the bridge exists")
