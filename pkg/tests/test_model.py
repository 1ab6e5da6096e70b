import json
import os
import tempfile
import unittest
from dataclasses import replace

import numpy as np
from scipy import integrate, stats

from src.model.config import ConfigError, ModelConfig, build_model, load_model
from src.model.families.gaussian import GaussianDensity
from src.model.families.identity import IdentityDynamics
from src.model.families.midpoint import ContinuousDensity
from src.model.families.uniform import UniformDensity
from src.model.kernel import build_kernel, quadrature_exit_mass
from src.model.mdp import ChainModel, RewardModel, augmented_kernel, transition_matrix_at, validate_model
from src.model.serialize import dump_model, load_model_dump
from tests.fixtures import BLEND_MODEL, TOY_MODEL, make_actions, make_grid, random_model


def _toy_data():
    with open(TOY_MODEL, "r", encoding="utf-8") as handle:
        return json.load(handle)


class NegativeDensity(ContinuousDensity):
    def pdf(self, targets, source, mode, payload, bounds):
        values = np.ones(targets.shape[0])
        values[1] = -1.0
        return values

    def exit_probability(self, source, mode, payload, bounds):
        return 0.0


class ModelConfigTest(unittest.TestCase):
    # 正向：内置玩具模型加载后所有不变量成立，_comment 键被忽略
    def test_toy_model_is_valid(self):
        model, config = load_model(TOY_MODEL)

        self.assertEqual(validate_model(model), [])
        self.assertTrue(model.exit_free())
        self.assertEqual(model.n_points, 21)
        self.assertEqual(model.n_actions, 2)
        self.assertEqual(config.mixing.family, "prior")
        self.assertEqual(config.experiment["memory"], 1)

    # 正向：P(x) = [[1-x, x], [x, 1-x]] 在 x=0 为单位阵，在 x=0.5 为均匀阵
    def test_blend_chain_depends_on_state(self):
        model, _ = load_model(BLEND_MODEL)

        self.assertEqual(validate_model(model), [])
        self.assertFalse(model.exit_free())
        np.testing.assert_allclose(transition_matrix_at(model.chain, 0), np.eye(2))
        np.testing.assert_allclose(transition_matrix_at(model.chain, 10), [[0.5, 0.5], [0.5, 0.5]])
        self.assertFalse(model.chain.is_constant())

    # 正向：常数链在所有网格点上相同
    def test_constant_chain_is_constant(self):
        model, _ = load_model(TOY_MODEL)
        self.assertTrue(model.chain.is_constant())
        np.testing.assert_allclose(transition_matrix_at(model.chain, 7), [[0.9, 0.1], [0.2, 0.8]])

    # 负向：越界网格编号
    def test_transition_matrix_rejects_bad_index(self):
        model, _ = load_model(TOY_MODEL)
        with self.assertRaises(IndexError):
            transition_matrix_at(model.chain, model.n_points)

    # 负向：多个段同时出错时一次性报告
    def test_collects_errors_from_all_sections(self):
        data = _toy_data()
        data["gamma"] = 1.0
        data["dynamics"]["family"] = "teleport"

        with self.assertRaises(ConfigError) as ctx:
            ModelConfig.from_dict(data)

        diagnostics = ctx.exception.diagnostics
        self.assertGreaterEqual(len(diagnostics), 2)
        self.assertTrue(any("gamma" in line for line in diagnostics))
        self.assertTrue(any("dynamics.family" in line for line in diagnostics))

    # 负向：未知的实验参数
    def test_rejects_unknown_experiment_key(self):
        data = _toy_data()
        data["experiment"]["horizon"] = 3
        with self.assertRaises(ConfigError) as ctx:
            ModelConfig.from_dict(data)
        self.assertIn("experiment.horizon", str(ctx.exception))

    # 负向：族参数非法时 build_model 转成 ConfigError
    def test_build_model_wraps_family_errors(self):
        data = _toy_data()
        data["dynamics"]["params"]["sigma"] = [0.0, 0.1]
        config = ModelConfig.from_dict(data)
        with self.assertRaises(ConfigError) as ctx:
            build_model(config)
        self.assertIn("sigma", str(ctx.exception))

    # 负向：文件不存在、内容不是 JSON
    def test_from_json_file_errors(self):
        with self.assertRaises(ConfigError):
            ModelConfig.from_json_file("/nonexistent/model.json")
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "broken.json")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write("{not json")
            with self.assertRaises(ConfigError) as ctx:
                ModelConfig.from_json_file(path)
            self.assertIn("not valid JSON", str(ctx.exception))


class KernelTest(unittest.TestCase):
    def setUp(self):
        self.grid = make_grid(21)
        self.actions = make_actions(2)

    # 正向：恒等动态的核是单位阵，无出界
    def test_identity_dynamics(self):
        kernel = build_kernel(IdentityDynamics(), self.grid, 2, self.actions)
        for s in range(2):
            for u in range(2):
                np.testing.assert_array_equal(kernel.probs[:, s, u, :], np.eye(21))
        self.assertFalse(kernel.has_exit())

    # 正向：均匀密度每行都是 1/网格点数
    def test_uniform_density_rows(self):
        kernel = build_kernel(UniformDensity(), self.grid, 1, self.actions)
        np.testing.assert_allclose(kernel.probs, np.full(kernel.probs.shape, 1.0 / 21), atol=1e-15)
        self.assertLess(kernel.conservation_error(), 1e-12)

    # 正向：出界质量等于高斯尾概率
    def test_gaussian_exit_mass_matches_tail(self):
        actions = make_actions(2)
        # payload 为 ±0.1，gain=1 时 x=0.9 向右的均值正好是 1.0
        density = GaussianDensity(gain=1.0, sigma=np.array([0.1]), drift=np.array([0.0]), boundary="exit")
        kernel = build_kernel(density, self.grid, 1, actions)

        expected = stats.norm.sf(1.0, loc=1.0, scale=0.1) + stats.norm.cdf(0.0, loc=1.0, scale=0.1)
        self.assertAlmostEqual(float(kernel.exit_mass[18, 0, 1]), expected, places=12)
        self.assertLess(kernel.conservation_error(), 1e-12)

    # 正向：truncate 边界没有出界质量
    def test_gaussian_truncate_has_no_exit(self):
        density = GaussianDensity(gain=1.0, sigma=np.array([0.2]), drift=np.array([0.0]), boundary="truncate")
        kernel = build_kernel(density, self.grid, 1, self.actions)
        self.assertFalse(kernel.has_exit())
        np.testing.assert_allclose(kernel.probs.sum(axis=3), 1.0, atol=1e-12)

    # 负向：负密度带位置信息报错
    def test_negative_density_rejected(self):
        with self.assertRaises(ValueError) as ctx:
            build_kernel(NegativeDensity(), self.grid, 1, self.actions)
        self.assertIn("x=0", str(ctx.exception))
        self.assertIn("negative density", str(ctx.exception))

    # 正向：数值积分与解析尾概率一致
    def test_quadrature_matches_exit_mass(self):
        density = GaussianDensity(gain=1.0, sigma=np.array([0.1]), drift=np.array([0.0]), boundary="exit")
        kernel = build_kernel(density, self.grid, 1, self.actions)
        payload = self.actions.payload(1, self.grid.dim)

        estimate, error = quadrature_exit_mass(density, self.grid.points[18], 0, payload, self.grid.bounds, 1000)
        self.assertLess(error, 1e-6)
        self.assertLess(abs(estimate - float(kernel.exit_mass[18, 0, 1])), 1e-6)
        inside, _ = integrate.quad(stats.norm.pdf, 0.0, 1.0, args=(1.0, 0.1))
        self.assertAlmostEqual(estimate, 1.0 - inside, places=6)
        with self.assertRaises(ValueError):
            quadrature_exit_mass(density, self.grid.points[18], 0, payload, self.grid.bounds, 0)

    # 正向：加密后原网格点仍在新网格上
    def test_refined_grid_keeps_points(self):
        refined = self.grid.refined(2)
        self.assertEqual(refined.n_points, 41)
        np.testing.assert_allclose(refined.points[::2], self.grid.points, atol=1e-15)


class AugmentedKernelTest(unittest.TestCase):
    # 正向：联合转移每行和为 1，对 s' 求和得到 x 的核，对 x' 求和得到链的行乘以留存概率
    def test_joint_transition(self):
        model = random_model(seed=3, exit_scale=0.3)
        joint = augmented_kernel(model)
        S = model.modes
        self.assertEqual(joint.shape, (model.n_points * S, model.n_actions, model.n_points * S + 1))
        np.testing.assert_allclose(joint.sum(axis=2), 1.0, atol=1e-12)

        inside = joint[:, :, :-1].reshape(model.n_points, S, model.n_actions, model.n_points, S)
        np.testing.assert_allclose(inside.sum(axis=4), model.kernel.probs, atol=1e-15)
        stay = 1.0 - model.kernel.exit_mass
        expected = stay[..., None] * model.chain.matrices[:, :, None, :]
        np.testing.assert_allclose(inside.sum(axis=3), expected, atol=1e-12)
        np.testing.assert_array_equal(joint[:, :, -1].reshape(model.n_points, S, model.n_actions), model.kernel.exit_mass)


class ValidateModelTest(unittest.TestCase):
    # 负向：负奖励只报一条 reward_bounds 违例
    def test_negative_reward(self):
        model = random_model(seed=1)
        values = np.array(model.reward.values)
        values[0, 1] = -0.1
        broken = replace(model, reward=RewardModel(values, model.bound_M))

        violations = validate_model(broken)
        self.assertEqual(len(violations), 1)
        self.assertEqual(violations[0].rule, "reward_bounds")
        self.assertEqual(violations[0].path, "reward[x=0, u=1]")

    # 负向：行和为 0.99 的链
    def test_chain_row_not_stochastic(self):
        model = random_model(seed=2)
        matrices = np.array(model.chain.matrices)
        matrices[1, 0] = [0.89, 0.1]
        broken = replace(model, chain=ChainModel(matrices))

        violations = validate_model(broken)
        self.assertEqual([item.rule for item in violations], ["row_stochastic"])
        self.assertEqual(violations[0].path, "chain[x=1].row[0]")

    # 正向：导出后重新加载得到同样的数组
    def test_dump_and_reload(self):
        model, _ = load_model(TOY_MODEL)
        payload = json.loads(json.dumps(dump_model(model)))
        restored = load_model_dump(payload)

        np.testing.assert_array_equal(restored.kernel.probs, model.kernel.probs)
        np.testing.assert_array_equal(restored.chain.matrices, model.chain.matrices)
        np.testing.assert_array_equal(restored.reward.values, model.reward.values)
        self.assertEqual(restored.gamma, model.gamma)
        self.assertEqual(validate_model(restored), [])


if __name__ == "__main__":
    # 避免 CI 误执行，留空
    pass
