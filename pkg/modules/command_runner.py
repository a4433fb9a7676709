"""
Command execution behind the CLI: covers, forall, exists, normalize, search.

run_command never raises for expected failures. Errors go through the
central error handler and come back as a CommandReport with the exit code
set, so main() only has to print and exit.
"""
from dataclasses import dataclass
from typing import Any, Dict, Optional, Union

from loguru import logger

from modules import config
from modules.cantor_spaces import digit_region
from modules.config_loader import AppConfig
from modules.error_handler import (EnumerationCapError, ErrorContext,
                                   UnsupportedOperationError, get_error_handler)
from modules.generators import DigitGenerator, PrefixGenerator
from modules.machine_parser import parse_machine, print_machine
from modules.machine_runtime import compile_machine
from modules.machines import FormalMachine, normalize
from modules.quantifier import box_holds, cantor_search, exists, forall
from modules.semidecider import Halted
from modules.space_interface import Presentation, SpaceKind
from modules.space_registry import get_space

COMMANDS = ("covers", "forall", "exists", "normalize", "search")


@dataclass
class RunConfig:
    """
    Settings for one command. Validated on construction.

    Raises:
        ValueError: For non-integer counts, fuel below 1, negative caps or an unknown strategy
    """
    space: SpaceKind = SpaceKind.CANTOR_DIGITS
    fuel: int = config.DEFAULT_FUEL
    max_family_size: int = config.DEFAULT_MAX_FAMILY_SIZE
    max_generator_index: int = config.DEFAULT_MAX_GENERATOR_INDEX
    max_families: int = config.DEFAULT_MAX_FAMILIES
    strategy: str = "refinement"
    workers: int = config.DEFAULT_WORKERS
    json: bool = False
    depth: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.space, str):
            self.space = SpaceKind.parse(self.space)
        for name in ("fuel", "max_family_size", "max_generator_index", "max_families", "workers", "depth"):
            value = getattr(self, name)
            if value is not None and (not isinstance(value, int) or isinstance(value, bool)):
                raise ValueError(f"{name} must be an integer, got {value!r}")
        if self.fuel < 1:
            raise ValueError(f"fuel must be at least 1, got {self.fuel}")
        for name in ("max_family_size", "max_generator_index", "max_families"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.strategy not in config.COVER_STRATEGIES:
            raise ValueError(f"unknown cover strategy '{self.strategy}' "
                             f"(known: {', '.join(config.COVER_STRATEGIES)})")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if self.depth is not None and self.depth < 0:
            raise ValueError(f"depth must be non-negative, got {self.depth}")

    @classmethod
    def from_app_config(cls, app: AppConfig, **overrides) -> "RunConfig":
        """Config file values, with non-None overrides (CLI flags) on top"""
        values = dict(
            fuel=app.search.fuel,
            max_family_size=app.search.max_family_size,
            max_generator_index=app.search.max_generator_index,
            max_families=app.search.max_families,
            strategy=app.search.cover_strategy,
            workers=app.runtime.workers,
            json=app.output.json,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class CommandReport:
    command: str
    space: str
    input: str
    result: Union[bool, str, None] = None
    fuel_used: Optional[int] = None
    exit_code: int = 0
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "command": self.command,
            "space": self.space,
            "input": self.input,
            "result": self.result,
            "fuel_used": self.fuel_used,
        }
        if self.error is not None:
            out["error"] = self.error
        return out

    def to_text(self) -> str:
        if self.error is not None:
            return self.error
        if isinstance(self.result, bool):
            return "true" if self.result else "false"
        if self.result is None:
            return "none"
        return str(self.result)


def _check_caps(sp: Presentation, m: FormalMachine, cfg: RunConfig) -> None:
    """The families strategy only runs on machines within the enumeration caps"""
    nm = normalize(m)
    if len(nm.branches) > cfg.max_family_size:
        raise EnumerationCapError(f"{len(nm.branches)} branches exceed --max-family-size {cfg.max_family_size}")
    for g in nm.generators:
        index = sp.generator_index(g)
        if index > cfg.max_generator_index:
            raise EnumerationCapError(
                f"generator {g} has index {index}, above --max-generator-index {cfg.max_generator_index}")


def _search_depth(m: FormalMachine) -> int:
    depth = 0
    for g in m.generators:
        if isinstance(g, DigitGenerator):
            depth = max(depth, g.index + 1)
        elif isinstance(g, PrefixGenerator):
            depth = max(depth, len(g.word))
    return depth


def _search(sp: Presentation, m: FormalMachine, cfg: RunConfig) -> Optional[str]:
    """A word w of length d whose region lies inside m, by racing the quantifiers"""
    if sp.kind is SpaceKind.CANTOR_DIGITS:
        region_of = digit_region
    elif sp.kind is SpaceKind.CANTOR_PREFIX:
        region_of = lambda w: frozenset([PrefixGenerator(w)])
    else:
        raise UnsupportedOperationError(f"search needs a Cantor presentation, not {sp.name}")
    d = cfg.depth if cfg.depth is not None else _search_depth(m)
    if (1 << d) > cfg.max_families:
        raise EnumerationCapError(f"search depth {d} needs {1 << d} words, cap is {cfg.max_families}")
    nm = normalize(m)
    return cantor_search(lambda w: box_holds(sp, nm, region_of(w)), d, workers=cfg.workers)


def run_command(cmd: str, cfg: RunConfig, expr: str) -> CommandReport:
    """
    Run one command on a machine expression.

    covers and normalize are exact. forall and exists report HALTED(step) or
    SUSPENDED(fuel); SUSPENDED means no halt within the budget, never "false".
    search reports a witness word or none.
    """
    sp = get_space(cfg.space)
    report = CommandReport(cmd, sp.name, expr)
    try:
        if cmd not in COMMANDS:
            raise ValueError(f"unknown command '{cmd}'")
        m = parse_machine(expr)
        sp.check_machine(m)

        if cmd == "covers":
            report.result = sp.covers(m)
        elif cmd == "normalize":
            report.result = print_machine(normalize(m))
        elif cmd in ("forall", "exists"):
            if cfg.strategy == "families":
                _check_caps(sp, m, cfg)
            quantify = forall if cmd == "forall" else exists
            decider = quantify(sp, compile_machine(m), strategy=cfg.strategy, workers=cfg.workers)
            outcome = decider.run(cfg.fuel)
            report.result = str(outcome)
            report.fuel_used = outcome.at_step if isinstance(outcome, Halted) else cfg.fuel
        else:
            report.result = _search(sp, m, cfg)
        logger.info(f"{cmd} [{sp.name}] {expr!r} -> {report.to_text()}")
    except Exception as e:
        context = ErrorContext(cmd, space=sp.name, expression=expr)
        handled = get_error_handler().handle(e, context, log_traceback=True)
        report.exit_code = handled.exit_code
        report.error = handled.message
    return report
