"""Solver service.

Dispatches validated instances to the solvers and turns their results into
the report models of :mod:`sas_mdp.utils.models`.
"""

import logging
import time
from typing import Dict, Optional, Tuple

import numpy as np

from sas_mdp.config import SolverSettings
from sas_mdp.core.mdp import ValueFunction, value_bound
from sas_mdp.core.policy import DecisionListPolicy, greedy_dl
from sas_mdp.core.validation import ValidatedInstance
from sas_mdp.embedded import build_embedded, compress_value, solve_embedded_vi
from sas_mdp.lp import solve_lp
from sas_mdp.rl import (
    LearningConfig,
    LearningResult,
    SasEnvironment,
    TrajectoryRecorder,
    compressed_value_from_q,
    sas_q_learning,
)
from sas_mdp.solve import policy_iteration, value_iteration, vi_iteration_bound
from sas_mdp.utils.errors import NotConvergedError
from sas_mdp.utils.models import LearnReport, SolveReport, SolverName, StateReport

logger = logging.getLogger(__name__)


class SolverService:
    """Runs solvers with defaults taken from :class:`SolverSettings`."""

    def __init__(self, settings: Optional[SolverSettings] = None):
        self.settings = settings or SolverSettings()

    def _run(
        self, instance: ValidatedInstance, solver: SolverName, eps: float, tol: float
    ) -> Tuple[ValueFunction, DecisionListPolicy, int, Optional[int]]:
        mdp, avail = instance.mdp, instance.availability
        if solver == "vi":
            if not avail.is_exact:
                return self._run_sampled_vi(instance, eps)
            result = value_iteration(mdp, avail, eps=eps, max_iters=self.settings.max_iters)
            return result.values, result.policy, result.iterations, None
        if solver == "pi":
            pi_result = policy_iteration(mdp, avail)
            return pi_result.values, pi_result.policy, pi_result.iterations, None
        if solver == "lp":
            lp_result = solve_lp(mdp, avail, tol=tol)
            return lp_result.values, lp_result.policy, lp_result.rounds, lp_result.n_constraints
        if solver == "embedded":
            emb = build_embedded(mdp, avail)
            solution = solve_embedded_vi(emb, eps=eps)
            values = compress_value(emb, solution.values)
            return values, greedy_dl(mdp.q_values(values)), solution.iterations, None
        raise ValueError(f"Unknown solver: {solver}")

    def _run_sampled_vi(
        self, instance: ValidatedInstance, eps: float
    ) -> Tuple[ValueFunction, DecisionListPolicy, int, Optional[int]]:
        # Sampling noise keeps the residual above the exact stopping threshold,
        # so sampled VI runs to max_iters and reports that iterate.
        try:
            result = value_iteration(
                instance.mdp,
                instance.availability,
                eps=eps,
                max_iters=self.settings.max_iters,
                n_samples=self.settings.ads_samples,
                seed=self.settings.seed,
            )
        except NotConvergedError as e:
            result = e.result
            logger.info(
                f"Sampled VI ran {result.iterations} iterations, "
                f"last residual {result.residuals[-1]:.3e}"
            )
        return result.values, result.policy, result.iterations, None

    def oracle_max_diff(
        self, instance: ValidatedInstance, values: ValueFunction, eps: Optional[float] = None
    ) -> float:
        """max |ΔV| between ``values`` and the compressed embedded-VI solution."""
        emb = build_embedded(instance.mdp, instance.availability)
        solution = solve_embedded_vi(emb, eps=eps or self.settings.eps)
        return float(np.max(np.abs(compress_value(emb, solution.values) - values)))

    def solve(
        self,
        instance: ValidatedInstance,
        solver: SolverName = "vi",
        eps: Optional[float] = None,
        tol: Optional[float] = None,
        oracle: bool = False,
    ) -> SolveReport:
        """Solve ``instance`` and build its report.

        Args:
            instance: Validated instance
            solver: One of vi, pi, lp, embedded
            eps: VI precision; settings default when None
            tol: LP tolerance; settings default when None
            oracle: Also report max |ΔV| against the embedded oracle

        Returns:
            The solve report
        """
        eps = eps or self.settings.eps
        tol = tol or self.settings.tol
        mdp = instance.mdp
        started = time.perf_counter()
        values, policy, iterations, constraints = self._run(instance, solver, eps, tol)
        wall_time = time.perf_counter() - started
        logger.info(f"Solver {solver} finished in {wall_time:.3f}s")

        oracle_diff = self.oracle_max_diff(instance, values, eps) if oracle else None
        labels = policy.labels(mdp)
        return SolveReport(
            solver=solver,
            n_states=mdp.n_states,
            n_actions=mdp.n_actions,
            states=[
                StateReport(state=mdp.state_name(s), value=float(values[s]), decision_list=labels[s])
                for s in range(mdp.n_states)
            ],
            iterations=iterations,
            constraints=constraints,
            wall_time=wall_time,
            oracle_max_diff=oracle_diff,
            value_bound=value_bound(mdp),
        )

    def learn(
        self,
        instance: ValidatedInstance,
        steps: int,
        horizon: int = 100,
        seed: Optional[int] = None,
        recorder: Optional[TrajectoryRecorder] = None,
        schedule: Optional[Dict[str, float]] = None,
    ) -> Tuple[LearnReport, LearningResult]:
        """Run SAS-Q-learning for about ``steps`` steps.

        ``schedule`` overrides LearningConfig fields such as ``epsilon_end`` or
        ``lr_exponent``.

        Raises:
            BadSampleCountError: If ``steps`` < 1
            pydantic.ValidationError: If a schedule value is out of range
        """
        seed = self.settings.seed if seed is None else seed
        config = LearningConfig.from_steps(
            steps, horizon=horizon, seed=seed, **(schedule or {})
        )
        env = SasEnvironment.from_instance(instance, seed=seed)
        result = sas_q_learning(env, config, recorder=recorder)
        compressed = compressed_value_from_q(result.q_values, instance.availability)
        report = LearnReport(
            steps=config.total_steps,
            episodes=config.episodes,
            q_values=result.q_values.tolist(),
            decision_lists=greedy_dl(result.q_values).labels(instance.mdp),
            compressed_values=compressed.tolist() if compressed is not None else None,
            final_mean_return=result.mean_returns()[-1],
        )
        return report, result

    def iteration_bound(self, instance: ValidatedInstance, delta: int) -> int:
        return vi_iteration_bound(instance.mdp, instance.availability, delta)
