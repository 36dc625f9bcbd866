"""krigdes CLI入口"""

import argparse
import logging
import os
import sys
from typing import List, Optional

# 添加项目根目录到路径
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from apps.cli.commands import COMMANDS, cmd_validate
from krigdes.config.settings import TASKS, Settings, init_settings
from krigdes.utils.errors import KrigdesError

# 配置日志
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="krigdes",
        description="krigdes - 克里金 GV / G / V / MES 最优设计"
    )
    parser.add_argument(
        "task",
        choices=TASKS,
        help="任务"
    )
    parser.add_argument(
        "--config", "-c",
        type=str,
        default=None,
        help="配置文件路径"
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="随机种子（覆盖配置）"
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="并发线程数（覆盖配置）"
    )
    parser.add_argument(
        "--out",
        type=str,
        default=None,
        help="输出目录（覆盖配置）"
    )
    parser.add_argument(
        "--full",
        action="store_true",
        help="validate：追加桌面规模参数研究与单次增量效率的门槛检查（耗时较长）"
    )
    parser.add_argument(
        "--debug", "-d",
        action="store_true",
        help="启用调试模式"
    )
    return parser


def load_settings(args: argparse.Namespace) -> Settings:
    """加载配置并应用命令行覆盖"""
    settings = init_settings(args.config)
    settings.task.name = args.task
    if args.seed is not None:
        settings.search.seed = args.seed
    if args.threads is not None:
        settings.search.workers = args.threads
    if args.out is not None:
        settings.output.out_dir = args.out
    return settings.validate()


def main(argv: Optional[List[str]] = None) -> int:
    """主函数，返回退出码"""
    args = build_parser().parse_args(argv)

    # 设置日志级别
    if args.debug:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        settings = load_settings(args)
        if args.task == "validate":
            path = cmd_validate(settings, full=args.full)
        else:
            path = COMMANDS[args.task](settings)
    except KrigdesError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"[错误] {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        logger.error(f"Invalid argument: {e}")
        print(f"[错误] {e}", file=sys.stderr)
        return 2

    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
