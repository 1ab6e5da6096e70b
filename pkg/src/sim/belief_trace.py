"""从 episode 轨迹提取开环信念序列：b(0) = b0，b(k+1) = P(x(k))^T b(k)。"""
from __future__ import annotations

from src.dp_nonmarkov.operators import BeliefTrajectory
from src.info.belief import Belief, propagate
from src.sim.episode import EpisodeTrace


def belief_trajectory_from_episode(trace: EpisodeTrace, b0: Belief, chain) -> BeliefTrajectory:
    if len(trace) == 0:
        raise ValueError("belief trajectory needs a nonempty episode (tau >= 0)")
    history = propagate(b0.weights, trace.x.tolist(), chain)
    beliefs = [Belief(row) for row in history]
    source = {
        "seed": trace.seed,
        "episode_index": trace.episode_index,
        "policy": trace.policy_label,
        "tau": trace.tau,
        "truncated": trace.truncated,
    }
    return BeliefTrajectory(beliefs, source)
