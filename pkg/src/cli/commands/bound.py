import logging

from src.cli.commands.common import CommandEnv
from src.cli.experiment import EXIT_NOT_CONVERGED, EXIT_OK, EXIT_VIOLATION
from src.dp_belief.belief_grid import BeliefGrid
from src.dp_belief.solver import belief_q_iteration, default_resolution
from src.dp_nonmarkov.bound import run_bound_pipeline, write_bound_csv, write_bound_summary
from src.dp_nonmarkov.lipschitz import estimate_lipschitz


def run(env: CommandEnv) -> int:
    """
    误差界验证：Q̂* 与 l_L* 只算一次，之后每个种子跑
    episode -> 信念轨迹 -> F^(k) 序列 -> 逐 k 比较 sup 误差与误差界。
    """
    logger = logging.getLogger(__name__)
    model = env.model
    experiment = env.experiment
    resolution = experiment.belief_res or default_resolution(model.modes)

    Qhat, trace = belief_q_iteration(model, BeliefGrid(model.modes, resolution), experiment.tol, experiment.max_iters)
    if not trace.converged:
        logger.error("reference optimum did not converge iterations=%s", trace.iterations)
        return EXIT_NOT_CONVERGED
    lipschitz = estimate_lipschitz(model, experiment.memory, experiment.mode, experiment.samples, experiment.seed)

    seeds = [experiment.seed + offset for offset in range(experiment.seeds)]
    env.context.add_seeds(seeds)
    reports = run_bound_pipeline(
        model, experiment.memory, experiment.iters, seeds, Qhat, lipschitz, threads=experiment.threads
    )
    for report in reports:
        write_bound_csv(env.path(f"bound_seed_{report.seed}.csv"), report)
    write_bound_summary(
        env.path("bound_summary.json"),
        reports,
        {"memory": experiment.memory, "K": experiment.iters, "belief_resolution": resolution},
    )

    failed = [report.seed for report in reports if not report.all_satisfied]
    if failed and not any(report.out_of_scope for report in reports):
        logger.error("error bound violated seeds=%s", failed)
        return EXIT_VIOLATION
    logger.info("bound done seeds=%s satisfied=%s", len(reports), not failed)
    return EXIT_OK
