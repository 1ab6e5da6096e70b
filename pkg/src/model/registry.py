from __future__ import annotations

"""族注册表：维护内置族的白名单映射。
注意：不提供外部修改接口，保持模型来源可控。新增族时新增一个模块并在这里登记。
"""

from .families.chains import BlendChain, ConstantChain, IdenticalRowsChain, IdentityChain
from .families.gaussian import GaussianDensity
from .families.identity import IdentityDynamics
from .families.rewards import ConstantReward, QuadraticReward, TableReward
from .families.shift import ShiftDynamics
from .families.uniform import UniformDensity

# 连续动态族白名单
DYNAMICS_FAMILIES = {
    "identity": IdentityDynamics,
    "shift": ShiftDynamics,
    "uniform": UniformDensity,
    "gaussian": GaussianDensity,
}

# 模态链族白名单
CHAIN_FAMILIES = {
    "constant": ConstantChain,
    "identity": IdentityChain,
    "identical_rows": IdenticalRowsChain,
    "blend": BlendChain,
}

# 奖励族白名单
REWARD_FAMILIES = {
    "constant": ConstantReward,
    "quadratic": QuadraticReward,
    "table": TableReward,
}
