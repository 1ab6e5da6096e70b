import logging

import numpy as np

from src.cli.commands.common import CommandEnv
from src.cli.experiment import EXIT_NOT_CONVERGED, EXIT_OK
from src.core.artifacts import write_json
from src.dp_markov.iteration import (
    greedy_policy,
    q_value_iteration,
    solver_result,
    value_iteration,
    write_residual_csv,
    write_solver_result,
)
from src.dp_markov.tables import sup_metric


def run(env: CommandEnv) -> int:
    """值迭代与 Q 值迭代各跑一遍，交叉检查 J* 与 min_u Q*，写出表、策略与残差轨迹。"""
    logger = logging.getLogger(__name__)
    experiment = env.experiment
    w = env.mixing(experiment.memory)

    J, j_trace = value_iteration(env.model, w, experiment.tol, experiment.max_iters)
    Q, q_trace = q_value_iteration(env.model, w, experiment.tol, experiment.max_iters)
    policy_j = greedy_policy(env.model, w, J)
    policy_q = greedy_policy(env.model, None, Q)

    write_solver_result(env.path("value_iteration.json"), solver_result(J, j_trace, w.space, policy_j))
    write_solver_result(env.path("q_value_iteration.json"), solver_result(Q, q_trace, w.space, policy_q))
    write_residual_csv(env.path("value_iteration_residuals.csv"), j_trace)
    write_residual_csv(env.path("q_value_iteration_residuals.csv"), q_trace)

    gap = sup_metric(J, Q.min_over_actions())
    summary = {
        "memory": experiment.memory,
        "mixing": w.label,
        "info_states": w.space.size,
        "value_iteration": {"iterations": j_trace.iterations, "converged": j_trace.converged},
        "q_value_iteration": {"iterations": q_trace.iterations, "converged": q_trace.converged},
        "j_vs_min_q": gap,
        "policies_agree": bool(np.array_equal(policy_j.choice, policy_q.choice)),
        "within_bounds": J.within_bounds(env.model.bound_M, env.model.gamma),
    }
    write_json(env.path("solve_summary.json"), summary)
    logger.info("solve done memory=%s gap=%s policies_agree=%s", experiment.memory, gap, summary["policies_agree"])

    if not (j_trace.converged and q_trace.converged):
        return EXIT_NOT_CONVERGED
    return EXIT_OK
