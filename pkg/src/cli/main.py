"""
命令行入口：python -m src.cli.main <command> --model PATH [--out DIR] [...]

退出码：0 正常，2 配置错误，3 未收敛，4 检测到不变量违例。
所有产物（含日志与 manifest.json）都写在 --out 目录下。
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import List, Optional

from src.cli.commands import COMMANDS
from src.cli.commands.common import CommandEnv
from src.cli.experiment import EXIT_CONFIG_ERROR, LIPSCHITZ_MODES, ExperimentConfig
from src.cli.logging_config import level_from_name, setup_logging
from src.cli.manifest import write_failure_manifest, write_manifest
from src.core.run_context import RunContext
from src.info.info_state import TableTooLargeError
from src.model.config import ConfigError, ModelConfig, build_model
from src.settings import LOG_LEVEL, OUTPUT_DIR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybrid-dp", description="有限记忆信息状态上的动态规划求解与验证")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in COMMANDS:
        command = sub.add_parser(name)
        command.add_argument("--model", required=True, help="模型 JSON 文件")
        command.add_argument("--out", default=None, help="输出目录（缺省取 HYBRID_DP_OUTPUT_DIR）")
        command.add_argument("--seed", type=int, default=None)
        command.add_argument("--tol", type=float, default=None)
        command.add_argument("--memory", type=int, default=None, help="信息窗口长度 L")
        command.add_argument("--belief-res", dest="belief_res", type=int, default=None, help="信念格点分辨率 m")
        command.add_argument("--iters", type=int, default=None, help="F^(k) 迭代次数 K")
        command.add_argument("--episodes", type=int, default=None)
        command.add_argument("--threads", type=int, default=None)
        command.add_argument("--seeds", type=int, default=None, help="误差界验证的种子个数")
        command.add_argument("--mode", choices=LIPSCHITZ_MODES, default=None)
        command.add_argument("--samples", type=int, default=None)
        command.add_argument("--max-memory", dest="max_memory", type=int, default=None)
        command.add_argument("--max-iters", dest="max_iters", type=int, default=None)
    return parser


def run(args: argparse.Namespace) -> int:
    """解析配置、构建模型、执行子命令并写 manifest；返回退出码。"""
    logger = logging.getLogger(__name__)
    context = RunContext(command=args.command)

    try:
        model_config = ModelConfig.from_json_file(args.model)
        experiment = ExperimentConfig.resolve(args, model_config.experiment)
    except ConfigError as exc:
        # 还没有解析出 ExperimentConfig，日志与最小 manifest 落到 --out 或缺省输出目录
        out_dir = args.out or OUTPUT_DIR
        setup_logging(os.path.join(out_dir, "logs"), "run.log", level_from_name(LOG_LEVEL))
        context.set_last_error(str(exc))
        for line in exc.diagnostics:
            logger.error("config error %s", line)
            print(f"config error: {line}", file=sys.stderr)
        context.finish(EXIT_CONFIG_ERROR)
        write_failure_manifest(out_dir, args.model, context)
        logger.info("run end command=%s exit_code=%s", args.command, EXIT_CONFIG_ERROR)
        return EXIT_CONFIG_ERROR

    setup_logging(os.path.join(experiment.out_dir, "logs"), "run.log", level_from_name(LOG_LEVEL))
    logger.info("run start command=%s model=%s out=%s", args.command, args.model, experiment.out_dir)

    exit_code = EXIT_CONFIG_ERROR
    try:
        model = build_model(model_config)
        env = CommandEnv(model=model, model_config=model_config, experiment=experiment, context=context)
        exit_code = COMMANDS[args.command](env)
    except ConfigError as exc:
        context.set_last_error(str(exc))
        for line in exc.diagnostics:
            logger.error("config error %s", line)
            print(f"config error: {line}", file=sys.stderr)
        exit_code = EXIT_CONFIG_ERROR
    except TableTooLargeError as exc:
        context.set_last_error(str(exc))
        logger.error("table too large what=%s required=%s limit=%s", exc.what, exc.required, exc.limit)
        print(f"config error: {exc}", file=sys.stderr)
        exit_code = EXIT_CONFIG_ERROR
    except ValueError as exc:
        context.set_last_error(str(exc))
        logger.exception("run failed command=%s", args.command)
        print(f"error: {exc}", file=sys.stderr)
        exit_code = EXIT_CONFIG_ERROR
    finally:
        context.finish(exit_code)
        write_manifest(experiment, context)
        logger.info("run end command=%s exit_code=%s", args.command, exit_code)
    return exit_code


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
