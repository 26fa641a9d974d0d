import argparse
import sys
from typing import Any, Dict, Optional, Sequence

from loguru import logger

from ._errors import FedMatrixError
from ._fedmatrix import FedMatrix
from .experiment import ExperimentConfig, load_experiment_config, parse_override


# subcommand -> registered task
COMMANDS = {
    "generate-data": "generate_data",
    "train": "train",
    "compare": "compare",
    "explain": "explain",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fedmatrix", description="FedMatrix 联邦学习实验工具")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub = subparsers.add_parser(command)
        sub.add_argument("--config", help="YAML 配置文件，或用于重放的 manifest.json")
        sub.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                         help="覆盖配置项，可重复")
        sub.add_argument("--seed", type=int)
        sub.add_argument("--rounds", type=int)
        sub.add_argument("--out-dir")
        sub.add_argument("--run-name")
        sub.add_argument("--log-level")
        if command == "explain":
            sub.add_argument("--checkpoint")
    return parser


def _collect_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides = dict(parse_override(item) for item in args.overrides)
    shorthands: Dict[str, Any] = {
        "seed": args.seed,
        "rounds": args.rounds,
        "out_dir": args.out_dir,
        "run_name": args.run_name,
        "log_level": args.log_level,
        "checkpoint": getattr(args, "checkpoint", None),
    }
    overrides.update({key: value for key, value in shorthands.items() if value is not None})
    return overrides


def _configure_logging(config: ExperimentConfig) -> None:
    logger.remove()
    logger.add(sys.stderr, level=config.log_level)
    if config.log_file:
        logger.add(config.run_dir / config.log_file, level=config.log_level, encoding="utf-8")


def _fail(error: BaseException, name: Optional[str] = None) -> None:
    message = " ".join(str(error).split())
    print(f"error={name or type(error).__name__} message={message}", file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_experiment_config(args.config, _collect_overrides(args))
        _configure_logging(config)
        FedMatrix().run_task(COMMANDS[args.command], config)
    except FedMatrixError as exc:
        logger.error(f"{args.command} failed: {exc}")
        _fail(exc)
        return 2
    except OSError as exc:
        _fail(exc)
        return 2
    except Exception as exc:
        logger.opt(exception=exc).debug("unexpected failure")
        _fail(exc, "InternalError")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
