import logging
import math

from src.cli.commands.common import CommandEnv
from src.cli.experiment import EXIT_OK
from src.core.artifacts import write_json
from src.sim.episode import DRAW_INITIAL, UniformRandomPolicy, default_horizon, simulate_batch
from src.sim.export import write_columnar, write_jsonl
from src.sim.monte_carlo import batch_returns


def run(env: CommandEnv) -> int:
    """用均匀随机行为策略跑一批 episode，导出 JSON-lines 与列式二进制。"""
    model = env.model
    experiment = env.experiment
    policy = UniformRandomPolicy(model.n_actions, experiment.memory)
    max_steps = default_horizon(model.gamma, model.bound_M)
    env.context.add_seeds([experiment.seed])

    batch = simulate_batch(model, policy, DRAW_INITIAL, model.initial_s, max_steps, experiment.seed, experiment.episodes)
    write_jsonl(env.path("traces.jsonl"), batch.episodes())
    write_columnar(env.path("traces.col"), batch)
    returns = batch_returns(batch, model.gamma)
    write_json(
        env.path("simulate_summary.json"),
        {
            "episodes": batch.n_episodes,
            "max_steps": max_steps,
            "truncated": int(batch.truncated.sum()),
            "mean_return": math.fsum(returns) / len(returns),
            "policy": policy.label,
        },
    )
    logging.getLogger(__name__).info("simulate done episodes=%s max_steps=%s", batch.n_episodes, max_steps)
    return EXIT_OK
