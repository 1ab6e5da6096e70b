import logging

from src.cli.commands.common import CommandEnv
from src.cli.experiment import EXIT_NOT_CONVERGED, EXIT_OK
from src.dp_belief.belief_grid import BeliefGrid
from src.dp_belief.solver import belief_q_iteration, default_resolution, write_aug_table
from src.dp_markov.iteration import write_residual_csv


def run(env: CommandEnv) -> int:
    experiment = env.experiment
    resolution = experiment.belief_res or default_resolution(env.model.modes)
    bgrid = BeliefGrid(env.model.modes, resolution)
    Qhat, trace = belief_q_iteration(env.model, bgrid, experiment.tol, experiment.max_iters)
    write_aug_table(env.path("belief_q_iteration.json"), Qhat, trace)
    write_residual_csv(env.path("belief_q_iteration_residuals.csv"), trace)
    logging.getLogger(__name__).info(
        "belief-solve done resolution=%s beliefs=%s iterations=%s", resolution, bgrid.size, trace.iterations
    )
    return EXIT_OK if trace.converged else EXIT_NOT_CONVERGED
