"""
From machines to opens and back, for Cantor space.

quotient_q sends a machine process to the open it denotes: x goes to the
evaluation of the machine at the embedded point i(x). section_s_cantor goes
the other way for the digit presentation. Given a predicate u on partial
functions N -> 2 it builds the infinite machine whose branches are the
consistent finite sets E of digit generators on which u halts, read as the
partial function f_E. Opens are compared observationally, by sampling points
at a fixed fuel.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import isqrt
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Union

from loguru import logger

from modules.error_handler import UnsupportedOperationError
from modules.generators import DigitGenerator, GeneratorId
from modules.machine_runtime import (IDLE, EnumeratedProcess, MachineProcess, compile_machine,
                                     evaluate)
from modules.machines import FormalMachine, FormalMeet
from modules.points import BinaryStream, ConcretePoint
from modules.quantifier import SubsetEnumeration
from modules.semidecider import Halted, SemiDecider
from modules.space_interface import SpaceKind
from modules.space_registry import SpaceRef, get_space


class PartialFunctionPoint:
    """
    Partial function N -> {0, 1}. Reading an undefined position suspends
    forever.
    """

    def __init__(self, assignment: Union[Mapping[int, int], Callable[[int], Optional[int]]],
                 label: str = ""):
        if isinstance(assignment, Mapping):
            table = dict(assignment)
            self._value = table.get
            label = label or "{" + ",".join(f"{n}:{b}" for n, b in sorted(table.items())) + "}"
        else:
            self._value = assignment
        self.label = label or "partial"
        self._never = SemiDecider.never()
        self._halt = SemiDecider.halting_at(1)

    @classmethod
    def from_meet(cls, E: Iterable[GeneratorId]) -> "PartialFunctionPoint":
        """f_E: digit n is 0 if z_n is in E, 1 if u_n is in E, undefined otherwise"""
        table: Dict[int, int] = {}
        for g in E:
            if not isinstance(g, DigitGenerator):
                raise UnsupportedOperationError(f"f_E needs digit generators, got {g}")
            if table.setdefault(g.index, g.bit) != g.bit:
                raise ValueError(f"E fixes digit {g.index} to both 0 and 1")
        return cls(table)

    @classmethod
    def from_stream(cls, x: BinaryStream) -> "PartialFunctionPoint":
        """Total function image of a stream"""
        return cls(x.digit, label=x.label)

    def value(self, n: int) -> Optional[int]:
        return self._value(n)

    def query(self, n: int) -> SemiDecider:
        return self._never if self.value(n) is None else self._halt

    def __repr__(self):
        return f"<PartialFunctionPoint {self.label}>"


class PointPredicate:
    """
    Semi-decidable predicate u on partial functions. `depth`, when known, is
    the number of leading positions u ever reads.
    """

    def __init__(self, decide: Callable[[PartialFunctionPoint], SemiDecider],
                 depth: Optional[int] = None, label: str = ""):
        self._decide = decide
        self.depth = depth
        self.label = label or "u"

    def __call__(self, f: PartialFunctionPoint) -> SemiDecider:
        return self._decide(f)

    def __repr__(self):
        return f"<PointPredicate {self.label}>"


def read_digits(k: int, accept: Callable[[str], bool], label: str = "") -> PointPredicate:
    """
    Predicate reading positions 0..k-1: halts once the defined digits force
    accept on every completion, after one step per defined digit (at least
    one). On total functions this is just accept of the first k digits.
    """
    label = label or f"read {k}"

    def decide(f: PartialFunctionPoint) -> SemiDecider:
        known = [f.value(n) for n in range(k)]
        choices = [(str(b),) if b is not None else ("0", "1") for b in known]
        if all(accept("".join(w)) for w in product(*choices)):
            return SemiDecider.halting_at(max(1, sum(b is not None for b in known)), label)
        return SemiDecider.never(label)

    return PointPredicate(decide, depth=k, label=label)


class OpenOnX:
    """An open of a space, as a semi-decider per concrete point"""

    def __init__(self, accept: Callable[[ConcretePoint], SemiDecider], space: SpaceRef,
                 label: str = ""):
        self._accept = accept
        self.space = get_space(space)
        self.label = label

    def __call__(self, x: ConcretePoint) -> SemiDecider:
        return self._accept(x)

    def observe(self, x: ConcretePoint, fuel: int) -> bool:
        return isinstance(self._accept(x).run(fuel), Halted)

    def agrees_with(self, other: "OpenOnX", points: Iterable[ConcretePoint], fuel: int) -> bool:
        """Same halting verdict at every sampled point within fuel"""
        return all(self.observe(x, fuel) == other.observe(x, fuel) for x in points)

    def __repr__(self):
        return f"<OpenOnX {self.label} on {self.space.name}>"


def quotient_q(mp: Union[MachineProcess, FormalMachine], space: SpaceRef) -> OpenOnX:
    """The open denoted by a machine: x goes to evaluate(mp, i(x))"""
    sp = get_space(space)
    if isinstance(mp, FormalMachine):
        sp.check_machine(mp)
        mp = compile_machine(mp)
    return OpenOnX(lambda x: evaluate(mp, sp.embed(x)), sp, label=f"q({getattr(mp, 'source', None) or mp!r})")


def open_of_predicate(u: PointPredicate, space: SpaceRef = SpaceKind.CANTOR_DIGITS) -> OpenOnX:
    """u read as an open of Cantor space, through the total function of each stream"""
    return OpenOnX(lambda x: u(PartialFunctionPoint.from_stream(x)), space, label=u.label)


# --- the section -----------------------------------------------------------

def pair(j: int, k: int) -> int:
    return (j + k) * (j + k + 1) // 2 + k


def unpair(i: int):
    w = (isqrt(8 * i + 1) - 1) // 2
    k = i - w * (w + 1) // 2
    return w - k, k


def _require_cantor_digits(space: SpaceRef):
    sp = get_space(space)
    if sp.kind is not SpaceKind.CANTOR_DIGITS:
        raise UnsupportedOperationError(
            f"the section is only available for {SpaceKind.CANTOR_DIGITS.value}, not {sp.name}")
    return sp


def section_s_cantor(u: PointPredicate, space: SpaceRef = SpaceKind.CANTOR_DIGITS) -> EnumeratedProcess:
    """
    The machine whose branches are the consistent finite E with u(f_E) halting.

    Slot i unpairs to (j, k). It holds the meet of digit set j when that set is
    consistent and u(f_E) halts at exactly step k, and IDLE otherwise, so
    every accepted E appears once. Slots are computed once per process.

    Raises:
        UnsupportedOperationError: For any space other than cantor-digits
    """
    sp = _require_cantor_digits(space)
    enum = SubsetEnumeration(sp)

    @lru_cache(maxsize=None)
    def slot(i: int):
        j, k = unpair(i)
        if k == 0:
            return IDLE
        E = enum.set_at(j)
        if any(g.opposite() in E for g in E):
            return IDLE
        outcome = u(PartialFunctionPoint.from_meet(E)).run(k)
        if isinstance(outcome, Halted) and outcome.at_step == k:
            return FormalMeet(E)
        return IDLE

    return EnumeratedProcess(slot, label=f"s({u.label})")


def section_fuel_bound(u: PointPredicate) -> int:
    """
    Fuel within which evaluate(s(u), i(x)) halts whenever u halts on x.

    The digits of x's first k positions give E with index below 4^k and u
    halting by step k, so its slot is at most pair(4^k, k). Every generator
    started by then has index below that slot's bit length.
    """
    if u.depth is None:
        raise ValueError(f"{u.label}: predicate depth is unknown, pass fuel explicitly")
    k = u.depth
    stage = pair(1 << (2 * k), max(1, k))
    return (stage + 1) * (1 + stage.bit_length())


@dataclass
class SampleCheck:
    point: str
    u_halts: bool
    section_halts: bool

    @property
    def passed(self) -> bool:
        return self.u_halts == self.section_halts


@dataclass
class SectionReport:
    predicate: str
    fuel: int
    samples: List[SampleCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.samples)

    @property
    def failures(self) -> List[SampleCheck]:
        return [s for s in self.samples if not s.passed]


def check_section_laws(u: PointPredicate, sample_points: Iterable[BinaryStream],
                       fuel: Optional[int] = None) -> SectionReport:
    """
    Observational check of the section laws at each sample x: evaluating
    s(u) at i(x) agrees with u on x. On a concrete point q(s(u)) is observed
    by that same evaluation, so one comparison covers both laws.
    """
    fuel = fuel if fuel is not None else section_fuel_bound(u)
    sp = get_space(SpaceKind.CANTOR_DIGITS)
    s_u = section_s_cantor(u, sp)
    as_open = open_of_predicate(u, sp)
    report = SectionReport(u.label, fuel)
    for x in sample_points:
        report.samples.append(SampleCheck(
            point=x.label,
            u_halts=as_open.observe(x, fuel),
            section_halts=isinstance(evaluate(s_u, sp.embed(x)).run(fuel), Halted),
        ))
    if not report.passed:
        logger.error(f"section laws failed for {u.label} at "
                     f"{', '.join(s.point for s in report.failures)}")
    return report
