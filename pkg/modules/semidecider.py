"""
Fuel-indexed semi-deciders and generalized points.

A SemiDecider answers `run(fuel)` with Halted(at_step) or Suspended(fuel).
The halting step is the least fuel at which the computation is seen to halt,
so answers are monotone in fuel: once Halted at f, Halted with the same step
at every f' >= f. Repeated calls agree.

A decider may also carry a forecast: its complete behaviour (halts at step h,
or never halts) when that is known without running it. Schedulers use
forecasts to account for tasks arithmetically instead of stepping them.
"""
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, FrozenSet, Hashable, Optional, Union

from modules.generators import GeneratorId


@dataclass(frozen=True)
class Halted:
    at_step: int

    def __str__(self):
        return f"HALTED({self.at_step})"


@dataclass(frozen=True)
class Suspended:
    """No halt within `fuel`; says nothing about larger budgets"""
    fuel: int

    def __str__(self):
        return f"SUSPENDED({self.fuel})"


Outcome = Union[Halted, Suspended]


class ForecastKind(Enum):
    HALTS = "halts"
    DIVERGES = "diverges"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Forecast:
    kind: ForecastKind
    step: Optional[int] = None

    @classmethod
    def halts(cls, step: int) -> "Forecast":
        return cls(ForecastKind.HALTS, step)

    @classmethod
    def diverges(cls) -> "Forecast":
        return _DIVERGES

    @classmethod
    def unknown(cls) -> "Forecast":
        return _UNKNOWN

    @property
    def is_known(self) -> bool:
        return self.kind is not ForecastKind.UNKNOWN


_DIVERGES = Forecast(ForecastKind.DIVERGES)
_UNKNOWN = Forecast(ForecastKind.UNKNOWN)

# step_fn(fuel) -> least halting step <= fuel, or None
StepFn = Callable[[int], Optional[int]]


class SemiDecider:
    """
    Memoizing wrapper around a step function.

    The step function is only ever called with fuel larger than any fuel already known
    to suspend; calls are serialized by an internal lock so a decider can be
    shared between threads.
    """

    def __init__(self, step_fn: StepFn, forecaster: Optional[Callable[[], Forecast]] = None,
                 label: str = ""):
        self._step_fn = step_fn
        self._forecaster = forecaster
        self.label = label
        self._lock = threading.RLock()
        self._halted_at: Optional[int] = None
        self._suspended_through = 0
        self._forecast: Optional[Forecast] = None

    @classmethod
    def halting_at(cls, step: int, label: str = "") -> "SemiDecider":
        if step < 1:
            raise ValueError(f"halting step must be >= 1, got {step}")
        return cls(lambda fuel: step if fuel >= step else None,
                   forecaster=lambda: Forecast.halts(step), label=label)

    @classmethod
    def never(cls, label: str = "") -> "SemiDecider":
        return cls(lambda fuel: None, forecaster=Forecast.diverges, label=label)

    @classmethod
    def from_forecast(cls, forecast: Forecast, label: str = "") -> "SemiDecider":
        if forecast.kind is ForecastKind.HALTS:
            return cls.halting_at(forecast.step, label)
        if forecast.kind is ForecastKind.DIVERGES:
            return cls.never(label)
        raise ValueError("cannot build a decider from an unknown forecast")

    @property
    def forecast(self) -> Forecast:
        with self._lock:
            if self._forecast is None:
                self._forecast = self._forecaster() if self._forecaster else Forecast.unknown()
                if self._forecast.kind is ForecastKind.HALTS:
                    self._halted_at = self._forecast.step
            return self._forecast

    def run(self, fuel: int) -> Outcome:
        if fuel < 0:
            raise ValueError(f"fuel must be non-negative, got {fuel}")
        with self._lock:
            if self._halted_at is not None:
                return Halted(self._halted_at) if self._halted_at <= fuel else Suspended(fuel)
            if self._forecast is not None and self._forecast.kind is ForecastKind.DIVERGES:
                return Suspended(fuel)
            if fuel <= self._suspended_through:
                return Suspended(fuel)

            step = self._step_fn(fuel)
            if step is None:
                self._suspended_through = fuel
                return Suspended(fuel)
            if not (self._suspended_through < step <= fuel):
                raise RuntimeError(
                    f"non-monotone step function{' ' + self.label if self.label else ''}: "
                    f"step {step} at fuel {fuel}, suspended through {self._suspended_through}")
            self._halted_at = step
            return Halted(step)

    def halts_within(self, fuel: int) -> bool:
        return isinstance(self.run(fuel), Halted)

    def hide_forecast(self) -> "SemiDecider":
        """Same behaviour, but a scheduler must run it to learn anything"""
        return SemiDecider(lambda fuel: _step_of(self.run(fuel)), label=self.label)

    def __repr__(self):
        return f"<SemiDecider {self.label or hex(id(self))}>"


def _step_of(outcome: Outcome) -> Optional[int]:
    return outcome.at_step if isinstance(outcome, Halted) else None


class GeneralizedPoint:
    """
    Point of the space of generator predicates: one semi-decider per generator.

    `support`, when set, promises that the point halts at step 1 exactly on
    those generators and never on any other; the runtime uses it to evaluate
    formal machines in closed form.
    """

    def __init__(self, query_fn: Callable[[GeneratorId], SemiDecider], label: str = "",
                 support: Optional[FrozenSet[GeneratorId]] = None):
        self._query_fn = query_fn
        self.label = label
        self.support = support
        self._cache: Dict[Hashable, SemiDecider] = {}
        self._lock = threading.Lock()

    def query(self, g: GeneratorId) -> SemiDecider:
        with self._lock:
            decider = self._cache.get(g)
        if decider is None:
            decider = self._query_fn(g)
            with self._lock:
                decider = self._cache.setdefault(g, decider)
        return decider

    def __repr__(self):
        return f"<GeneralizedPoint {self.label}>"


def membership_point(member: Callable[[GeneratorId], bool], label: str = "",
                     support: Optional[FrozenSet[GeneratorId]] = None) -> GeneralizedPoint:
    """Point halting in one step on generators where `member` holds"""
    halt = SemiDecider.halting_at(1)
    never = SemiDecider.never()
    return GeneralizedPoint(lambda g: halt if member(g) else never, label=label, support=support)
