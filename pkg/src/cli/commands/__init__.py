"""子命令注册表：命令名 -> run(env) -> 退出码。"""
from typing import Callable, Dict

from src.cli.commands import belief_solve, bound, evaluate, lipschitz, simulate, solve, validate
from src.cli.commands.common import CommandEnv

COMMANDS: Dict[str, Callable[[CommandEnv], int]] = {
    "validate": validate.run,
    "solve": solve.run,
    "evaluate": evaluate.run,
    "belief-solve": belief_solve.run,
    "bound": bound.run,
    "lipschitz": lipschitz.run,
    "simulate": simulate.run,
}
