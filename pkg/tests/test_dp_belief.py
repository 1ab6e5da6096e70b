import unittest

import numpy as np

from src.core.rng import stream
from src.dp_belief.belief_grid import BeliefGrid, belief_interpolate
from src.dp_belief.solver import (
    AugQTable,
    belief_q_iteration,
    default_resolution,
    f_hat_backup,
    q_lipschitz_in_belief,
    resolution_study,
)
from src.dp_markov.iteration import q_value_iteration
from src.dp_markov.mixing import build_mixing
from src.dp_markov.operators import bellman_F
from src.dp_markov.tables import QTable
from src.info.belief import Belief
from src.info.info_state import InfoSpace
from tests.fixtures import random_model


class BeliefGridTest(unittest.TestCase):
    # 正向：格点个数为 C(m+|S|-1, |S|-1)，每个格点都在单纯形上
    def test_lattice_size(self):
        self.assertEqual(BeliefGrid(2, 20).size, 21)
        self.assertEqual(BeliefGrid(3, 10).size, 66)
        self.assertEqual(BeliefGrid(1, 5).size, 1)
        points = BeliefGrid(3, 4).points
        np.testing.assert_allclose(points.sum(axis=1), 1.0)
        self.assertTrue(np.all(points >= 0.0))

    # 正向：(0.55, 0.45) 落在 (0.6, 0.4) 与 (0.5, 0.5) 正中
    def test_two_mode_interpolation(self):
        bgrid = BeliefGrid(2, 10)
        result = dict(belief_interpolate(bgrid, Belief([0.55, 0.45])))
        expected = {bgrid.index_of([0.6, 0.4]): 0.5, bgrid.index_of([0.5, 0.5]): 0.5}
        self.assertEqual(set(result), set(expected))
        for index, weight in expected.items():
            self.assertAlmostEqual(result[index], weight, places=12)

    # 正向：格点上的信念只有一个权重 1，包括单纯形顶点
    def test_lattice_point_is_exact(self):
        bgrid = BeliefGrid(3, 5)
        for weights in ([0.2, 0.4, 0.4], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.6, 0.4]):
            result = belief_interpolate(bgrid, Belief(weights))
            self.assertEqual(result, [(bgrid.index_of(weights), 1.0)])

    # 正向：线性函数插值精确，权重非负且和为 1
    def test_linear_reproduction(self):
        bgrid = BeliefGrid(3, 7)
        generator = stream(21)
        beliefs = generator.dirichlet(np.ones(3), size=200)
        coefficients = np.array([0.3, -1.2, 2.5])
        indices, weights = bgrid.interpolate_many(beliefs)

        self.assertTrue(np.all(weights >= 0.0))
        np.testing.assert_allclose(weights.sum(axis=1), 1.0, atol=1e-12)
        values = bgrid.points @ coefficients
        interpolated = np.einsum("nv,nv->n", weights, values[indices])
        np.testing.assert_allclose(interpolated, beliefs @ coefficients, atol=1e-12)
        # 顶点的重心坐标复原信念本身
        rebuilt = np.einsum("nv,nvs->ns", weights, bgrid.points[indices])
        np.testing.assert_allclose(rebuilt, beliefs, atol=1e-12)

    # 负向：模态数不一致、不在格点上
    def test_rejects_mismatched_beliefs(self):
        bgrid = BeliefGrid(2, 4)
        with self.assertRaises(ValueError):
            belief_interpolate(bgrid, Belief([0.2, 0.3, 0.5]))
        with self.assertRaises(ValueError):
            bgrid.index_of([0.3, 0.7])
        with self.assertRaises(ValueError):
            BeliefGrid(2, 0)

    # 正向：默认分辨率
    def test_default_resolution(self):
        self.assertEqual(default_resolution(2), 20)
        self.assertEqual(default_resolution(3), 10)
        self.assertEqual(default_resolution(5), 6)


def brute_force_f_hat(model, bgrid, Qhat):
    """恒等链下 P(x)^T b = b，后继信念留在原格点上，可以直接枚举。"""
    out = np.zeros_like(Qhat.values)
    V = Qhat.values.min(axis=2)
    for x in range(model.n_points):
        for j, b in enumerate(bgrid.points):
            for u in range(model.n_actions):
                total = model.reward.values[x, u]
                for y in range(model.n_points):
                    p = sum(b[s] * model.kernel.probs[x, s, u, y] for s in range(model.modes))
                    total += model.gamma * p * V[y, j]
                out[x, j, u] = total
    return out


class FHatTest(unittest.TestCase):
    # 正向：Q̂ ≡ 0 时备份结果就是 R(x, u)
    def test_backup_from_zero(self):
        model = random_model(seed=22, exit_scale=0.2)
        bgrid = BeliefGrid(2, 5)
        result = f_hat_backup(model, bgrid, AugQTable.zeros(model.n_points, bgrid, model.n_actions))
        np.testing.assert_array_equal(result.values, np.broadcast_to(model.reward.values[:, None, :], result.values.shape))

    # 正向：后继信念留在格点上时与枚举一致
    def test_backup_matches_enumeration(self):
        model = random_model(seed=23, exit_scale=0.2, chain=np.eye(2))
        bgrid = BeliefGrid(2, 4)
        Qhat = AugQTable(stream(24).random((model.n_points, bgrid.size, model.n_actions)) * 4.0, bgrid)
        np.testing.assert_allclose(f_hat_backup(model, bgrid, Qhat).values, brute_force_f_hat(model, bgrid, Qhat), atol=1e-12)

    # 正向：|S|=1 时退化为 dp_markov 的 F
    def test_single_mode_reduces_to_bellman_F(self):
        model = random_model(seed=25, modes=1, exit_scale=0.2)
        bgrid = BeliefGrid(1, 1)
        values = stream(26).random((model.n_points, model.n_actions)) * 3.0
        w = build_mixing(model, InfoSpace(model.n_points, 0), "uniform")

        f_hat = f_hat_backup(model, bgrid, AugQTable(values[:, None, :], bgrid))
        f = bellman_F(model, w, QTable(values, 0))
        np.testing.assert_allclose(f_hat.values[:, 0, :], f.values, atol=1e-12)

        Qhat, _ = belief_q_iteration(model, bgrid, tol=1e-10)
        Q, _ = q_value_iteration(model, w, tol=1e-10)
        np.testing.assert_allclose(Qhat.values[:, 0, :], Q.values, atol=1e-9)

    # 正向：F̂ 是 γ 压缩（100 对随机表，含三模态格点）
    def test_contraction(self):
        generator = stream(28)
        for modes, resolution in ((2, 6), (3, 3)):
            model = random_model(seed=27, modes=modes, exit_scale=0.1)
            bgrid = BeliefGrid(modes, resolution)
            shape = (model.n_points, bgrid.size, model.n_actions)
            for _ in range(50):
                scale = 10.0 ** generator.uniform(-2.0, 1.0)
                left = AugQTable(generator.normal(size=shape) * scale, bgrid)
                right = AugQTable(generator.normal(size=shape) * scale, bgrid)
                gap = np.max(np.abs(f_hat_backup(model, bgrid, left).values - f_hat_backup(model, bgrid, right).values))
                self.assertLessEqual(gap, model.gamma * np.max(np.abs(left.values - right.values)) + 1e-12)

    # 正向：从 0 出发的迭代始终在 [0, M/(1-γ)] 内
    def test_iterates_bounded(self):
        model = random_model(seed=32, exit_scale=0.1)
        bgrid = BeliefGrid(2, 5)
        current = AugQTable.zeros(model.n_points, bgrid, model.n_actions)
        for _ in range(60):
            current = f_hat_backup(model, bgrid, current)
            self.assertTrue(current.within_bounds(model.bound_M, model.gamma))

    # 负向：表与格点分辨率不一致
    def test_grid_mismatch(self):
        model = random_model(seed=30)
        with self.assertRaises(ValueError):
            f_hat_backup(model, BeliefGrid(2, 5), AugQTable.zeros(model.n_points, BeliefGrid(2, 4), 2))


class BeliefIterationTest(unittest.TestCase):
    # 正向：γ = 0 时 Q̂* = R
    def test_myopic(self):
        model = random_model(seed=31, gamma=0.0)
        bgrid = BeliefGrid(2, 3)
        Qhat, trace = belief_q_iteration(model, bgrid)
        self.assertEqual(trace.iterations, 1)
        np.testing.assert_array_equal(Qhat.values, np.broadcast_to(model.reward.values[:, None, :], Qhat.values.shape))

    # 正向：行全相同的链下 Q̂* 关于 b 是线性的，在 b = μ 处与固定混合的 Q* 相同
    def test_identical_rows_chain(self):
        mu = np.array([0.5, 0.5])
        model = random_model(seed=32, exit_scale=0.1, chain=np.tile(mu, (2, 1)))
        bgrid = BeliefGrid(2, 10)
        Qhat, trace = belief_q_iteration(model, bgrid, tol=1e-10)
        self.assertTrue(trace.converged)
        self.assertTrue(Qhat.within_bounds(model.bound_M, model.gamma))

        e0, e1 = bgrid.index_of([1.0, 0.0]), bgrid.index_of([0.0, 1.0])
        mixed = bgrid.index_of([0.3, 0.7])
        np.testing.assert_allclose(
            Qhat.values[:, mixed, :], 0.3 * Qhat.values[:, e0, :] + 0.7 * Qhat.values[:, e1, :], atol=1e-9
        )

        w = build_mixing(model, InfoSpace(model.n_points, 0), "fixed", Belief(mu))
        Q, _ = q_value_iteration(model, w, tol=1e-10)
        np.testing.assert_allclose(Qhat.values[:, bgrid.index_of(mu), :], Q.values, atol=1e-9)

    # 正向：value_at 在格点上取表值
    def test_value_at_lattice_point(self):
        model = random_model(seed=33)
        bgrid = BeliefGrid(2, 4)
        Qhat = AugQTable(stream(34).random((model.n_points, bgrid.size, model.n_actions)), bgrid)
        j = bgrid.index_of([0.25, 0.75])
        self.assertAlmostEqual(Qhat.value_at(2, Belief([0.25, 0.75]), 1), float(Qhat.values[2, j, 1]), places=12)

    # 正向：分辨率研究逐级比较，Lipschitz 估计非负
    def test_resolution_study(self):
        model = random_model(seed=35, exit_scale=0.1, gamma=0.5)
        steps = resolution_study(model, [8, 4], tol=1e-8)
        self.assertEqual(len(steps), 1)
        self.assertEqual((steps[0].coarse, steps[0].fine), (4, 8))
        self.assertGreaterEqual(steps[0].change, 0.0)
        self.assertGreaterEqual(steps[0].estimate, 0.0)

        table, _ = belief_q_iteration(model, BeliefGrid(2, 4), tol=1e-8)
        self.assertGreaterEqual(q_lipschitz_in_belief(table), 0.0)
        with self.assertRaises(ValueError):
            resolution_study(model, [4, 4])


if __name__ == "__main__":
    # 避免 CI 误执行，留空
    pass
