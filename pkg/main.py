# main.py
"""
machine-space command line.

    machine-space covers    --space cantor-digits "z0 | u0"
    machine-space forall    --space cantor-digits --fuel 1000 "z0"
    machine-space exists    --space interval "i(1/3,2/3)"
    machine-space normalize --space cantor-prefix 'l"0" | l"01"'
    machine-space search    --space cantor-digits --depth 3 "z0 & u2"

Pass '-' as the expression to read it from stdin. Exit codes: 0 success
(SUSPENDED included), 2 space mismatch, 3 syntax error, 4 limits exceeded,
1 anything unexpected.
"""
import argparse
import json
import sys
from typing import List, Optional

from loguru import logger

from modules import config
from modules.command_runner import COMMANDS, RunConfig, run_command
from modules.config_loader import get_config_loader, reload_config
from modules.space_interface import SpaceKind

COMMAND_HELP = {
    "covers": "decide whether the machine covers the whole space",
    "forall": "semi-decide that the machine halts on every point",
    "exists": "semi-decide that the machine halts on some point",
    "normalize": "print the absorption normal form",
    "search": "find a word whose region lies inside the machine (Cantor spaces)",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("expression", help="machine expression, or '-' to read stdin")
    common.add_argument("--space", choices=[k.value for k in SpaceKind], default=None,
                        help=f"presented space (default {SpaceKind.CANTOR_DIGITS.value})")
    common.add_argument("--fuel", type=int, default=None, help="step budget for forall/exists")
    common.add_argument("--max-family-size", type=int, default=None,
                        help="branch cap for the families strategy")
    common.add_argument("--max-generator-index", type=int, default=None,
                        help="generator index cap for the families strategy")
    common.add_argument("--strategy", choices=config.COVER_STRATEGIES, default=None,
                        help="cover enumeration for forall/exists")
    common.add_argument("--workers", type=int, default=None, help="threads per scheduler stage")
    common.add_argument("--depth", type=int, default=None, help="word length for search")
    common.add_argument("--json", action="store_true", default=None, help="emit a JSON report")
    common.add_argument("--config", default=None, help="YAML config file")
    common.add_argument("--log-level", default=None, help="stderr log level (default WARNING)")

    parser = argparse.ArgumentParser(prog=config.APP_NAME,
                                     description="Semi-decide quantifiers over presented spaces")
    parser.add_argument("--version", action="version", version=f"%(prog)s {config.APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=COMMAND_HELP[name])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    loader = reload_config(args.config) if args.config else get_config_loader()
    app_config = loader.config
    config.configure_logging(args.log_level or app_config.output.log_level, app_config.output.log_file)

    try:
        run_config = RunConfig.from_app_config(
            app_config,
            space=args.space,
            fuel=args.fuel,
            max_family_size=args.max_family_size,
            max_generator_index=args.max_generator_index,
            strategy=args.strategy,
            workers=args.workers,
            depth=args.depth,
            json=args.json,
        )
    except ValueError as e:
        parser.error(str(e))

    expression = sys.stdin.read() if args.expression == "-" else args.expression
    logger.debug(f"{args.command} with {run_config}")
    report = run_command(args.command, run_config, expression.strip())

    if run_config.json:
        print(json.dumps(report.to_dict()))
    elif report.exit_code == 0:
        print(report.to_text())
    else:
        print(report.to_text(), file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
