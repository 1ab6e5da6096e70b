import unittest
from unittest.mock import patch

import numpy as np

from src.info.belief import Belief, belief_update, beta, propagate
from src.info.info_state import InfoSpace, InfoState, TableTooLargeError, push_observation, window_matrices
from src.model.mdp import ChainModel
from tests.fixtures import ERGODIC_P


def constant_chain(matrix, n_points=3):
    matrix = np.asarray(matrix, dtype=float)
    return ChainModel(np.broadcast_to(matrix, (n_points,) + matrix.shape))


class InfoStateTest(unittest.TestCase):
    # 正向：L=0 时直接替换
    def test_push_memory_zero(self):
        info = InfoState((1,), 3)
        self.assertEqual(push_observation(info, 2).window, (2,))

    # 正向：新观测放最前，丢掉最旧的
    def test_push_shifts_window(self):
        info = InfoState((2, 0, 1), 3)
        self.assertEqual(push_observation(info, 1).window, (1, 2, 0))

    # 正向：推入 L+1 次后窗口完全被替换
    def test_push_replaces_whole_window(self):
        info = InfoState((0, 0, 0), 4)
        for x in (1, 2, 3):
            info = push_observation(info, x)
        self.assertEqual(info.window, (3, 2, 1))

    # 负向：非法网格编号
    def test_push_rejects_bad_index(self):
        with self.assertRaises(ValueError):
            push_observation(InfoState((0, 1), 3), 3)
        with self.assertRaises(ValueError):
            InfoState((0, -1), 3)

    # 正向：repeated 用 x(0) 填满窗口
    def test_repeated_window(self):
        self.assertEqual(InfoState.repeated(2, 2, 3).window, (2, 2, 2))


class InfoSpaceTest(unittest.TestCase):
    # 正向：编号以最新观测为最高位
    def test_index_encoding(self):
        space = InfoSpace(3, 2)
        self.assertEqual(space.size, 27)
        self.assertEqual(space.index_of(InfoState((2, 0, 1), 3)), 19)
        self.assertEqual(space.state_at(19).window, (2, 0, 1))
        np.testing.assert_array_equal(space.newest()[[0, 9, 19, 26]], [0, 1, 2, 2])

    # 正向：后继表与 push_observation 一致
    def test_successors_match_push(self):
        space = InfoSpace(3, 2)
        table = space.successors()
        for index in range(space.size):
            info = space.state_at(index)
            for x_new in range(3):
                expected = space.index_of(push_observation(info, x_new))
                self.assertEqual(table[index, x_new], expected)
                self.assertEqual(space.successor_index(index, x_new), expected)

    # 负向：窗口长度不匹配
    def test_index_of_rejects_other_memory(self):
        with self.assertRaises(ValueError):
            InfoSpace(3, 1).index_of(InfoState((0, 1, 2), 3))

    # 负向：超过表上限时在分配前报错
    @patch("src.info.info_state.MAX_TABLE_ELEMENTS", 100)
    def test_table_limit(self):
        space = InfoSpace(5, 2)
        with self.assertRaises(TableTooLargeError) as ctx:
            space.successors()
        self.assertEqual(ctx.exception.required, 125 * 5)
        self.assertEqual(ctx.exception.limit, 100)


class BeliefTest(unittest.TestCase):
    # 正向：单位阵不改变信念
    def test_update_identity(self):
        b = Belief([0.3, 0.7])
        updated = belief_update(b, 0, constant_chain(np.eye(2)))
        np.testing.assert_allclose(updated.weights, [0.3, 0.7])

    # 正向：置换矩阵交换模态
    def test_update_permutation(self):
        updated = belief_update(Belief([1.0, 0.0]), 1, constant_chain([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(updated.weights, [0.0, 1.0])

    # 正向：所有行相同时输出恒为该行
    def test_update_identical_rows(self):
        chain = constant_chain([[0.3, 0.7], [0.3, 0.7]])
        for weights in ([1.0, 0.0], [0.2, 0.8], [0.5, 0.5]):
            np.testing.assert_allclose(belief_update(Belief(weights), 2, chain).weights, [0.3, 0.7])

    # 正向：L=1 时等于两步矩阵乘积
    def test_beta_two_steps(self):
        chain = constant_chain(ERGODIC_P)
        P = np.array(ERGODIC_P)
        result = beta(InfoState((1, 2), 3), Belief([1.0, 0.0]), chain)
        expected = P.T @ (P.T @ np.array([1.0, 0.0]))
        np.testing.assert_allclose(result.weights, expected, atol=1e-15)
        np.testing.assert_allclose(result.weights, [0.83, 0.17], atol=1e-12)

    # 正向：L=0 时 beta 就是一次 belief_update；单位链时 beta 不变
    def test_beta_degenerate_cases(self):
        chain = constant_chain(ERGODIC_P)
        b = Belief([0.4, 0.6])
        np.testing.assert_array_equal(beta(InfoState((1,), 3), b, chain).weights, belief_update(b, 1, chain).weights)
        identity = constant_chain(np.eye(2))
        np.testing.assert_allclose(beta(InfoState((0, 1, 2), 3), b, identity).weights, b.weights)

    # 正向：窗口矩阵与逐步递推一致（状态相关链）
    def test_window_matrices_match_beta(self):
        lam = np.array([0.0, 0.5, 1.0])[:, None, None]
        chain = ChainModel((1.0 - lam) * np.eye(2) + lam * np.array([[0.0, 1.0], [1.0, 0.0]]) * 0.5 + lam * 0.25)
        space = InfoSpace(3, 2)
        matrices = window_matrices(chain.matrices, space)
        b = Belief([0.9, 0.1])
        for index in (0, 5, 14, 26):
            info = space.state_at(index)
            np.testing.assert_allclose(matrices[index] @ b.weights, beta(info, b, chain).weights, atol=1e-14)

    # 正向：propagate 返回含起点的整段历史
    def test_propagate_history(self):
        chain = constant_chain(ERGODIC_P)
        history = propagate([1.0, 0.0], [0, 1], chain)
        self.assertEqual(history.shape, (3, 2))
        np.testing.assert_allclose(history[2], [0.83, 0.17], atol=1e-12)

    # 负向：非法信念
    def test_invalid_belief(self):
        with self.assertRaises(ValueError):
            Belief([0.5, 0.6])
        with self.assertRaises(ValueError):
            Belief([1.2, -0.2])
        with self.assertRaises(ValueError):
            Belief([])


if __name__ == "__main__":
    # 避免 CI 误执行，留空
    pass
