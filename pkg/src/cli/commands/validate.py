import logging

from src.cli.commands.common import CommandEnv
from src.cli.experiment import EXIT_OK, EXIT_VIOLATION
from src.core.artifacts import write_json
from src.core.types import violations_to_list
from src.model.mdp import validate_model
from src.model.serialize import dump_model


def run(env: CommandEnv) -> int:
    """检查模型不变量，写出违例列表与规范化模型导出。"""
    logger = logging.getLogger(__name__)
    violations = validate_model(env.model)
    write_json(env.path("violations.json"), {"violations": violations_to_list(violations)})
    write_json(env.path("model_dump.json"), dump_model(env.model))
    if violations:
        for item in violations:
            logger.error("violation path=%s rule=%s expected=%s actual=%s", item.path, item.rule, item.expected, item.actual)
        return EXIT_VIOLATION
    logger.info("model valid points=%s modes=%s actions=%s", env.model.n_points, env.model.modes, env.model.n_actions)
    return EXIT_OK
