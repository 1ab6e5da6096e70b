import csv
import io
import json
import logging
import os
import tempfile
import unittest
from contextlib import redirect_stderr

from src.cli.experiment import EXIT_CONFIG_ERROR, EXIT_OK
from src.cli.main import main
from src.sim.export import read_columnar
from tests.fixtures import BLEND_MODEL, TOY_MODEL


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.out = self._tmp.name

    def tearDown(self):
        root = logging.getLogger()
        for handler in list(root.handlers):
            handler.close()
        root.handlers = []
        self._tmp.cleanup()

    def run_cli(self, *argv):
        stderr = io.StringIO()
        with redirect_stderr(stderr):
            code = main(list(argv) + ["--out", self.out])
        return code, stderr.getvalue()

    def load(self, name):
        with open(os.path.join(self.out, name), "r", encoding="utf-8") as handle:
            return json.load(handle)


class ValidateCommandTest(CliTestCase):
    # 正向：示例模型无违例，manifest 记录配置哈希与退出码
    def test_toy_model_is_valid(self):
        code, _ = self.run_cli("validate", "--model", TOY_MODEL)
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(self.load("violations.json"), {"violations": []})
        manifest = self.load("manifest.json")
        self.assertEqual(manifest["exit_code"], EXIT_OK)
        self.assertEqual(manifest["command"], "validate")
        self.assertRegex(manifest["config_hash"], r"^[0-9a-f]{64}$")
        self.assertIn("violations.json", manifest["artifacts"])
        self.assertTrue(os.path.isfile(os.path.join(self.out, "logs", "run.log")))

    # 正向：状态相关链的示例模型同样合法
    def test_blend_model_is_valid(self):
        code, _ = self.run_cli("validate", "--model", BLEND_MODEL)
        self.assertEqual(code, EXIT_OK)

    # 负向：γ 越界是配置错误
    def test_bad_gamma(self):
        with open(TOY_MODEL, "r", encoding="utf-8") as handle:
            data = json.load(handle)
        data["gamma"] = 1.5
        path = os.path.join(self.out, "bad_model.json")
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(data, handle)
        code, stderr = self.run_cli("validate", "--model", path)
        self.assertEqual(code, EXIT_CONFIG_ERROR)
        self.assertIn("config error", stderr)
        self.assertIn("gamma", stderr)
        self.assertEqual(self.load("manifest.json")["status"], "config_error")

    # 负向：模型文件不存在；仍写出日志和最小 manifest
    def test_missing_model(self):
        code, stderr = self.run_cli("validate", "--model", os.path.join(self.out, "absent.json"))
        self.assertEqual(code, EXIT_CONFIG_ERROR)
        self.assertIn("not found", stderr)

        manifest = self.load("manifest.json")
        self.assertEqual(manifest["status"], "config_error")
        self.assertEqual(manifest["exit_code"], EXIT_CONFIG_ERROR)
        self.assertEqual(manifest["command"], "validate")
        self.assertIsNone(manifest["config_hash"])
        self.assertIn("absent.json", manifest["last_error"])
        with open(os.path.join(self.out, "logs", "run.log"), "r", encoding="utf-8") as handle:
            self.assertIn("config error", handle.read())

    # 负向：命令行参数越界
    def test_bad_flag_value(self):
        code, stderr = self.run_cli("solve", "--model", TOY_MODEL, "--tol", "0")
        self.assertEqual(code, EXIT_CONFIG_ERROR)
        self.assertIn("--tol", stderr)


class SolveCommandTest(CliTestCase):
    # 正向：命令行参数覆盖模型文件里的默认值，来源记录在 manifest
    def test_solve_with_flag_override(self):
        code, _ = self.run_cli("solve", "--model", TOY_MODEL, "--memory", "0")
        self.assertEqual(code, EXIT_OK)
        summary = self.load("solve_summary.json")
        self.assertEqual(summary["memory"], 0)
        self.assertEqual(summary["info_states"], 21)
        self.assertLess(summary["j_vs_min_q"], 1e-5)
        self.assertTrue(summary["within_bounds"])

        manifest = self.load("manifest.json")
        self.assertEqual(manifest["parameters"]["memory"], 0)
        self.assertEqual(manifest["parameter_sources"]["memory"], "flag")
        self.assertEqual(manifest["parameter_sources"]["tol"], "model")
        self.assertTrue(os.path.isfile(os.path.join(self.out, "value_iteration_residuals.csv")))

    # 正向：同一模型同一参数，配置哈希相同
    def test_config_hash_is_stable(self):
        self.run_cli("solve", "--model", TOY_MODEL, "--memory", "0")
        first = self.load("manifest.json")["config_hash"]
        self.run_cli("solve", "--model", TOY_MODEL, "--memory", "0", "--threads", "2")
        self.assertEqual(self.load("manifest.json")["config_hash"], first)
        self.run_cli("solve", "--model", TOY_MODEL, "--memory", "0", "--tol", "1e-5")
        self.assertNotEqual(self.load("manifest.json")["config_hash"], first)


class EvaluateCommandTest(CliTestCase):
    # 正向：贪心策略的 J^π 与 J* 在容差内，Monte-Carlo 结果写入汇总
    def test_evaluate(self):
        code, _ = self.run_cli("evaluate", "--model", TOY_MODEL, "--memory", "0", "--tol", "1e-8", "--episodes", "50")
        self.assertEqual(code, EXIT_OK)
        summary = self.load("evaluate_summary.json")
        self.assertLessEqual(summary["j_star_vs_j_pi"], summary["j_star_vs_j_pi_limit"])
        self.assertEqual(summary["monte_carlo"]["n"], 50)
        self.assertEqual(len(summary["policy"]), 21)
        self.assertEqual(self.load("manifest.json")["seeds"], [7])


class BeliefAndBoundCommandTest(CliTestCase):
    # 正向：增广 Q̂* 按格点写出
    def test_belief_solve(self):
        code, _ = self.run_cli("belief-solve", "--model", TOY_MODEL, "--belief-res", "4")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(os.path.isfile(os.path.join(self.out, "belief_q_iteration.json")))

    # 正向：玩具模型上每个 k 都满足 sup 误差 <= 误差界 + 插值余量，逐 k 报告写出
    def test_bound(self):
        code, _ = self.run_cli(
            "bound", "--model", TOY_MODEL, "--seeds", "1", "--iters", "5", "--memory", "0", "--belief-res", "5"
        )
        self.assertEqual(code, EXIT_OK)
        summary = self.load("bound_summary.json")
        self.assertTrue(summary["all_satisfied"])
        self.assertEqual(self.load("manifest.json")["status"], "ok")
        for report in summary["reports"]:
            self.assertFalse(report["out_of_scope"])
            self.assertEqual(len(report["rows"]), 6)
            for row in report["rows"]:
                self.assertTrue(row["satisfied"])
                self.assertLessEqual(row["sup_error"], row["bound"] + row["slack"])

        with open(os.path.join(self.out, "bound_seed_7.csv"), "r", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ["k", "sup_error", "bound", "slack", "satisfied"])
        self.assertEqual(len(rows), 1 + 6)

    # 正向：同一种子跑两次，配置哈希相同，所有产物逐字节一致
    def test_bound_rerun_is_bit_identical(self):
        argv = ["bound", "--model", TOY_MODEL, "--seeds", "2", "--iters", "4", "--memory", "1", "--belief-res", "4"]
        self.run_cli(*argv)
        first = self.load("manifest.json")
        self.run_cli(*(argv + ["--threads", "2"]))
        second = self.load("manifest.json")

        self.assertEqual(first["config_hash"], second["config_hash"])
        self.assertEqual(first["exit_code"], second["exit_code"])
        self.assertEqual(
            set(first["artifact_sha256"]), {"bound_seed_7.csv", "bound_seed_8.csv", "bound_summary.json"}
        )
        self.assertEqual(first["artifact_sha256"], second["artifact_sha256"])


class LipschitzAndSimulateCommandTest(CliTestCase):
    # 正向：L = 0..max_memory 每个一行
    def test_lipschitz_sweep(self):
        code, _ = self.run_cli("lipschitz", "--model", TOY_MODEL, "--max-memory", "2")
        self.assertEqual(code, EXIT_OK)
        with open(os.path.join(self.out, "lipschitz.csv"), "r", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(len(rows), 1 + 3)
        values = [float(row[1]) for row in rows[1:]]
        for L, value in enumerate(values):
            self.assertAlmostEqual(value, 0.7 ** (L + 1), places=9)

    # 正向：导出的轨迹文件条数一致
    def test_simulate(self):
        code, _ = self.run_cli("simulate", "--model", TOY_MODEL, "--episodes", "3")
        self.assertEqual(code, EXIT_OK)
        summary = self.load("simulate_summary.json")
        header, columns = read_columnar(os.path.join(self.out, "traces.col"))
        with open(os.path.join(self.out, "traces.jsonl"), "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
        self.assertEqual(summary["episodes"], 3)
        self.assertEqual(header["counts"]["episodes"], 3)
        self.assertEqual(len(lines), header["counts"]["steps"])
        self.assertEqual(columns["x"].shape[0], header["counts"]["steps"])


if __name__ == "__main__":
    # 避免 CI 误执行，留空
    pass
