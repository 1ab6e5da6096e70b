"""子命令共用的运行环境。"""
from __future__ import annotations

import os
from dataclasses import dataclass

from src.cli.experiment import ExperimentConfig
from src.core.run_context import RunContext
from src.dp_markov.mixing import MixingWeights, build_mixing
from src.info.belief import Belief
from src.info.info_state import InfoSpace
from src.model.config import ModelConfig
from src.model.mdp import MdpModel


@dataclass
class CommandEnv:
    model: MdpModel
    model_config: ModelConfig
    experiment: ExperimentConfig
    context: RunContext

    def path(self, name: str) -> str:
        """产物路径：登记到运行上下文后返回。"""
        return self.context.add_artifact(os.path.join(self.experiment.out_dir, name))

    def mixing(self, memory: int) -> MixingWeights:
        config = self.model_config.mixing
        belief = Belief(config.belief) if config.belief is not None else None
        space = InfoSpace(self.model.n_points, memory)
        return build_mixing(self.model, space, config.family, belief)
