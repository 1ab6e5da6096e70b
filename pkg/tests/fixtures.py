"""测试用的小模型：直接拼数组，不走配置文件。"""
import os
from typing import Optional, Sequence

import numpy as np

from src.core.rng import stream
from src.info.belief import Belief
from src.model.grid import ActionSet, GridSpace
from src.model.kernel import TransitionKernel
from src.model.mdp import ChainModel, MdpModel, RewardModel

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
TOY_MODEL = os.path.join(ROOT, "configs", "toy_model.json")
BLEND_MODEL = os.path.join(ROOT, "configs", "blend_model.json")

ERGODIC_P = [[0.9, 0.1], [0.2, 0.8]]


def make_grid(n_points: int) -> GridSpace:
    return GridSpace(dim=1, bounds=((0.0, 1.0),), points_per_axis=n_points)


def make_actions(n_actions: int) -> ActionSet:
    labels = tuple(f"a{i}" for i in range(n_actions))
    return ActionSet(labels=labels, payloads=np.linspace(-0.1, 0.1, n_actions))


def make_model(
    probs: np.ndarray,
    exit_mass: np.ndarray,
    chain: np.ndarray,
    rewards: np.ndarray,
    gamma: float = 0.9,
    bound_M: float = 1.0,
    initial_s: Optional[Sequence[float]] = None,
) -> MdpModel:
    """probs 形状 (X, S, U, X)；chain 可以是 (S, S)（常数链）或 (X, S, S)。"""
    probs = np.asarray(probs, dtype=float)
    n_points, n_modes, n_actions = probs.shape[:3]
    chain = np.asarray(chain, dtype=float)
    if chain.ndim == 2:
        chain = np.broadcast_to(chain, (n_points, n_modes, n_modes))
    s0 = np.full(n_modes, 1.0 / n_modes) if initial_s is None else np.asarray(initial_s, dtype=float)
    return MdpModel(
        grid=make_grid(n_points),
        modes=n_modes,
        actions=make_actions(n_actions),
        kernel=TransitionKernel(probs=probs, exit_mass=exit_mass),
        chain=ChainModel(chain),
        reward=RewardModel(rewards, bound_M),
        gamma=gamma,
        initial_x=np.full(n_points, 1.0 / n_points),
        initial_s=Belief(s0),
    )


def random_model(
    seed: int = 0,
    n_points: int = 3,
    modes: int = 2,
    n_actions: int = 2,
    gamma: float = 0.9,
    exit_scale: float = 0.0,
    chain: Optional[np.ndarray] = None,
) -> MdpModel:
    """随机核与随机奖励；exit_scale > 0 时每行出界质量取 [0, exit_scale) 内的随机数。"""
    generator = stream(seed)
    raw = generator.random((n_points, modes, n_actions, n_points)) + 0.05
    exit_mass = exit_scale * generator.random((n_points, modes, n_actions))
    probs = raw / raw.sum(axis=3, keepdims=True) * (1.0 - exit_mass)[..., None]
    if chain is None:
        chain = ERGODIC_P if modes == 2 else np.full((modes, modes), 1.0 / modes)
    rewards = generator.random((n_points, n_actions))
    return make_model(probs, exit_mass, chain, rewards, gamma=gamma)


def identity_model(
    reward: float = 0.3, n_points: int = 2, modes: int = 1, n_actions: int = 1, gamma: float = 0.9
) -> MdpModel:
    """恒等动态、不出界、奖励恒为 reward：J* = reward / (1 - γ)。"""
    probs = np.broadcast_to(np.eye(n_points)[:, None, None, :], (n_points, modes, n_actions, n_points)).copy()
    exit_mass = np.zeros((n_points, modes, n_actions))
    rewards = np.full((n_points, n_actions), reward)
    return make_model(probs, exit_mass, np.eye(modes), rewards, gamma=gamma)


def exiting_model(n_points: int = 3, modes: int = 2, n_actions: int = 2) -> MdpModel:
    """所有行的出界质量都是 1。"""
    probs = np.zeros((n_points, modes, n_actions, n_points))
    exit_mass = np.ones((n_points, modes, n_actions))
    rewards = np.full((n_points, n_actions), 0.5)
    return make_model(probs, exit_mass, ERGODIC_P, rewards)
