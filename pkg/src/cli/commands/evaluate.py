import logging

import numpy as np

from src.cli.commands.common import CommandEnv
from src.cli.experiment import EXIT_NOT_CONVERGED, EXIT_OK, EXIT_VIOLATION
from src.core.artifacts import write_json
from src.dp_markov.iteration import greedy_policy, policy_evaluation, q_value_iteration, value_iteration
from src.dp_markov.tables import sup_metric
from src.sim.episode import DRAW_INITIAL
from src.sim.monte_carlo import monte_carlo_value


def run(env: CommandEnv) -> int:
    """
    求 J*、Q*，取贪心策略 π*，做策略评估得到 J^π*，
    再用 Monte-Carlo 从初始分布估计 J^π* 的期望并与表值对比。
    """
    logger = logging.getLogger(__name__)
    model = env.model
    experiment = env.experiment
    w = env.mixing(experiment.memory)

    J, j_trace = value_iteration(model, w, experiment.tol, experiment.max_iters)
    Q, q_trace = q_value_iteration(model, w, experiment.tol, experiment.max_iters)
    policy = greedy_policy(model, None, Q)
    J_pi, pi_trace = policy_evaluation(model, w, policy, experiment.tol, experiment.max_iters)

    # 回合开始时窗口用 x(0) 重复填满，对应编号 x * (1 + N + ... + N^L)
    repeat = sum(model.n_points ** power for power in range(experiment.memory + 1))
    start_values = J_pi.values[np.arange(model.n_points) * repeat]
    table_value = float(np.dot(model.initial_x, start_values))

    env.context.add_seeds([experiment.seed])
    estimate = monte_carlo_value(
        model, policy, DRAW_INITIAL, model.initial_s, experiment.episodes, experiment.seed, threads=experiment.threads
    )
    gap = sup_metric(J, J_pi)
    gap_limit = 2.0 * experiment.tol / (1.0 - model.gamma)
    deviation = abs(estimate.mean - table_value)
    summary = {
        "j_star_vs_j_pi": gap,
        "j_star_vs_j_pi_limit": gap_limit,
        "table_value_from_initial": table_value,
        "monte_carlo": estimate.to_dict(),
        "monte_carlo_deviation": deviation,
        "within_three_standard_errors": bool(deviation <= 3.0 * estimate.standard_error + estimate.truncation_tail),
        "converged": j_trace.converged and q_trace.converged and pi_trace.converged,
        "policy": policy.choice.tolist(),
    }
    write_json(env.path("evaluate_summary.json"), summary)
    logger.info(
        "evaluate done gap=%s table=%s mc_mean=%s mc_se=%s", gap, table_value, estimate.mean, estimate.standard_error
    )

    if not summary["converged"]:
        return EXIT_NOT_CONVERGED
    if gap > gap_limit:
        logger.error("greedy policy value deviates from optimum gap=%s limit=%s", gap, gap_limit)
        return EXIT_VIOLATION
    return EXIT_OK
