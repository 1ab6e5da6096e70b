from src.cli.commands.common import CommandEnv
from src.cli.experiment import EXIT_OK
from src.core.artifacts import write_csv, write_json
from src.dp_nonmarkov.lipschitz import lipschitz_sweep


def run(env: CommandEnv) -> int:
    experiment = env.experiment
    estimates = lipschitz_sweep(
        env.model, range(experiment.max_memory + 1), experiment.mode, experiment.samples, experiment.seed
    )
    rows = [[e.memory, e.value, e.product_bound, e.method, e.is_exact, e.samples] for e in estimates]
    write_csv(env.path("lipschitz.csv"), ["L", "l_star", "product_bound", "method", "is_exact", "samples"], rows)
    write_json(env.path("lipschitz.json"), {"estimates": [e.to_dict() for e in estimates]})
    return EXIT_OK
