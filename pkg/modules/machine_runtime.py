"""
Machine processes and the dovetail scheduler.

A MachineProcess enumerates the branches of a (possibly infinite) machine:
slot i holds a FormalMeet, IDLE, or END. Evaluating a process at a
generalized point dovetails all branches: one branch is started per stage
and every started generator query is advanced each stage.

Cost model shared by every scheduler in the package:

* Stage s first fetches group s (a branch, a cover family, a competitor, ...)
  and starts a task for every key in it not already running. Tasks are shared
  by key across groups.
* Every started task that has not halted is advanced by one unit. The stage
  costs 1 plus the number of tasks advanced.
* A task whose decider halts at step h halts at the end of its h-th stage.
  A group succeeds at the end of the first stage in which all of its tasks
  have halted; the run halts with the total cost spent so far.

Tasks with known forecasts are accounted arithmetically. Tasks without a
forecast are run with the whole fuel of the run, which yields the same halting
stage as stepping them one unit at a time.
"""
import heapq
import threading
from abc import ABC, abstractmethod
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from typing import (Callable, Dict, Hashable, Iterable, List, Optional, Sequence,
                    Tuple, Union)

from loguru import logger

from modules.generators import GeneratorId
from modules.machines import FormalMachine, FormalMeet, normalize
from modules.semidecider import (Forecast, ForecastKind, GeneralizedPoint, Halted,
                                 SemiDecider)


class _Marker:
    def __init__(self, name: str):
        self.name = name

    def __repr__(self):
        return self.name


IDLE = _Marker("IDLE")
END = _Marker("END")

Slot = Union[FormalMeet, _Marker]


class MachineProcess(ABC):
    """Enumeration of branches; slot i is a FormalMeet, IDLE or END"""

    source: Optional[FormalMachine] = None

    @abstractmethod
    def branch_at(self, i: int) -> Slot:
        ...

    @property
    def is_finite(self) -> bool:
        return False

    def next_candidate(self, i: int) -> Optional[int]:
        """Least slot >= i that may be a branch (None if END from i on)"""
        return i


class FormalProcess(MachineProcess):
    """Finite process: the branches of a formal machine, then END"""

    def __init__(self, source: FormalMachine, branches: Sequence[FormalMeet]):
        self.source = source
        self.branches: Tuple[FormalMeet, ...] = tuple(branches)
        self._intro: Dict[GeneratorId, int] = {}
        self._by_gen: Dict[GeneratorId, List[int]] = defaultdict(list)
        for j, b in enumerate(self.branches):
            for g in b.generators:
                self._intro.setdefault(g, j)
                self._by_gen[g].append(j)
        self.generator_order: Tuple[GeneratorId, ...] = tuple(
            sorted(self._intro, key=lambda g: (self._intro[g], g.sort_key)))
        self._top_index = next((j for j, b in enumerate(self.branches) if b.is_top), None)
        # introduced[j] counts generators first seen in branch j; the prefix sums
        # give the cost spent on divergent queries up to any stage in O(1)
        k = len(self.branches)
        counts = [0] * k
        for j in self._intro.values():
            counts[j] += 1
        self._count_prefix: List[int] = []
        self._weighted_prefix: List[int] = []
        c = w = 0
        for j in range(k):
            c += counts[j]
            w += j * counts[j]
            self._count_prefix.append(c)
            self._weighted_prefix.append(w)
        self._forecasts: Dict[Tuple[Forecast, ...], Forecast] = {}
        self._lock = threading.Lock()

    @property
    def is_finite(self) -> bool:
        return True

    def branch_at(self, i: int) -> Slot:
        if i < len(self.branches):
            return self.branches[i]
        return END

    def next_candidate(self, i: int) -> Optional[int]:
        return i if i < len(self.branches) else None

    def reordered(self, order: Sequence[int]) -> "FormalProcess":
        """Same branches started in another order"""
        if sorted(order) != list(range(len(self.branches))):
            raise ValueError("order must be a permutation of branch positions")
        return FormalProcess(self.source, [self.branches[i] for i in order])

    def box_step(self, support: Iterable[GeneratorId]) -> Optional[int]:
        """
        Halting step of this process at a point that halts in one step exactly
        on `support`, or None if it never halts there.
        """
        members = support if isinstance(support, (set, frozenset)) else frozenset(support)
        best = self._top_index
        for g in members:
            for j in self._by_gen.get(g, ()):
                if best is not None and j >= best:
                    break
                if self.branches[j].generators <= members:
                    best = j
                    break
        if best is None:
            return None
        j = best
        # every query introduced up to stage j is advanced from its first stage
        # through j, except members, which halt after one unit
        spent = (j + 1) * self._count_prefix[j] - self._weighted_prefix[j]
        for g in members:
            intro = self._intro.get(g)
            if intro is not None and intro <= j:
                spent -= (j - intro)
        return (j + 1) + spent

    def signature(self, x: GeneralizedPoint) -> Optional[Tuple[Forecast, ...]]:
        sig = []
        for g in self.generator_order:
            fc = x.query(g).forecast
            if not fc.is_known:
                return None
            sig.append(fc)
        return tuple(sig)

    def forecast_at(self, x: GeneralizedPoint, sig: Tuple[Forecast, ...]) -> Forecast:
        with self._lock:
            cached = self._forecasts.get(sig)
        if cached is None:
            cached = Dovetailer(BranchSource(self, x), label=f"evaluate {self.source}").forecast()
            with self._lock:
                self._forecasts[sig] = cached
        return cached

    def __repr__(self):
        return f"<FormalProcess {self.source}>"


class EnumeratedProcess(MachineProcess):
    """Process given by a slot function; infinite unless `length` is set"""

    def __init__(self, slot_fn: Callable[[int], Slot], label: str = "",
                 length: Optional[int] = None):
        self._slot_fn = slot_fn
        self.label = label
        self._length = length

    @property
    def is_finite(self) -> bool:
        return self._length is not None

    def branch_at(self, i: int) -> Slot:
        if self._length is not None and i >= self._length:
            return END
        return self._slot_fn(i)

    def next_candidate(self, i: int) -> Optional[int]:
        if self._length is not None and i >= self._length:
            return None
        return i

    def __repr__(self):
        return f"<EnumeratedProcess {self.label}>"


def compile_machine(m: FormalMachine) -> FormalProcess:
    """Branches of normalize(m) in canonical order, then END"""
    nm = normalize(m)
    return FormalProcess(nm, nm.ordered_branches())


# --- scheduler -------------------------------------------------------------

TaskSpec = Tuple[Hashable, Callable[[], SemiDecider]]


class Group:
    """Tasks a source asks for at one stage, plus a payload reported on success"""
    __slots__ = ("tasks", "payload")

    def __init__(self, tasks: Sequence[TaskSpec], payload=None):
        self.tasks = tasks
        self.payload = payload


class GroupSource(ABC):
    @abstractmethod
    def group_at(self, stage: int) -> Union[Group, _Marker]:
        ...

    @property
    def is_finite(self) -> bool:
        return False

    def next_candidate(self, stage: int) -> Optional[int]:
        """Least stage >= `stage` that may yield a group (None if END)"""
        return stage


class BranchSource(GroupSource):
    """Groups are branches of a process; tasks are generator queries at x"""

    def __init__(self, mp: MachineProcess, x: GeneralizedPoint):
        self._mp = mp
        self._x = x

    @property
    def is_finite(self) -> bool:
        return self._mp.is_finite

    def next_candidate(self, stage: int) -> Optional[int]:
        return self._mp.next_candidate(stage)

    def group_at(self, stage: int) -> Union[Group, _Marker]:
        slot = self._mp.branch_at(stage)
        if isinstance(slot, _Marker):
            return slot
        x = self._x
        return Group([(g, (lambda g=g: x.query(g))) for g in slot], payload=slot)


_EVENT, _DIVERGENT, _OPEN, _HALTED = range(4)


class _Task:
    __slots__ = ("key", "decider", "start", "state", "waiting")

    def __init__(self, key, decider, start):
        self.key = key
        self.decider = decider
        self.start = start
        self.state = _OPEN
        self.waiting: List["_PendingGroup"] = []


class _PendingGroup:
    __slots__ = ("stage", "payload", "remaining")

    def __init__(self, stage, payload, remaining):
        self.stage = stage
        self.payload = payload
        self.remaining = remaining


class _Unforecastable(Exception):
    pass


class Dovetailer:
    """
    Resumable simulation of one dovetailed run.

    `run(fuel)` continues from wherever the last call stopped, so probing
    with growing fuel costs no more than a single long run.
    """

    def __init__(self, source: GroupSource, workers: int = 1, label: str = ""):
        self._source = source
        self._workers = max(1, workers)
        self.label = label
        self._tasks: Dict[Hashable, _Task] = {}
        self._events: Dict[int, List[_Task]] = defaultdict(list)
        self._event_stages: List[int] = []
        self._open: List[_Task] = []
        self._live = 0
        self._stage = 0
        self._fetched = False
        self._ended = False
        self._cost = 0
        self._success: Optional[_PendingGroup] = None
        self._halted_at: Optional[int] = None
        self._diverged = False
        self._lock = threading.RLock()

    @property
    def winner(self):
        """Payload of the group that succeeded, if the run has halted"""
        return self._success.payload if self._halted_at is not None else None

    @property
    def tasks_started(self) -> int:
        return len(self._tasks)

    def run(self, fuel: int) -> Optional[int]:
        with self._lock:
            return self._advance(fuel)

    def forecast(self) -> Forecast:
        with self._lock:
            if self._halted_at is not None:
                return Forecast.halts(self._halted_at)
            if self._diverged:
                return Forecast.diverges()
            if not self._source.is_finite:
                return Forecast.unknown()
            try:
                step = self._advance(None)
            except _Unforecastable:
                return Forecast.unknown()
            return Forecast.halts(step) if step is not None else Forecast.diverges()

    # -- internals --

    def _advance(self, fuel: Optional[int]) -> Optional[int]:
        if self._halted_at is not None:
            return self._halted_at if fuel is None or self._halted_at <= fuel else None
        if self._diverged:
            return None
        if fuel is not None and fuel <= self._cost:
            return None
        if self._open:
            if fuel is None:
                raise _Unforecastable()
            self._run_tasks(list(self._open), fuel)

        while True:
            s = self._stage
            if not self._fetched and not self._ended:
                self._fetch(s, fuel)
            self._fetched = True
            if fuel is None and self._open:
                raise _Unforecastable()

            stage_cost = 1 + self._live
            if fuel is not None and self._cost + stage_cost > fuel:
                return None
            self._cost += stage_cost
            for task in self._events.pop(s, ()):
                self._halt(task)
            if self._success is not None:
                self._halted_at = self._cost
                logger.debug(f"{self.label}: halted at stage {s}, step {self._cost}")
                return self._cost
            self._stage = s + 1
            self._fetched = False

            target = self._next_interesting()
            if target is None:
                if not self._open:
                    self._diverged = True
                    logger.debug(f"{self.label}: diverges after stage {s}")
                    return None
                # only undecided tasks remain; every later stage is quiet
                per = 1 + self._live
                room = (fuel - self._cost) // per
                self._cost += room * per
                self._stage += room
                return None
            quiet = target - self._stage
            if quiet > 0:
                per = 1 + self._live
                if fuel is not None:
                    room = (fuel - self._cost) // per
                    if room < quiet:
                        self._cost += room * per
                        self._stage += room
                        return None
                self._cost += quiet * per
                self._stage = target

    def _next_interesting(self) -> Optional[int]:
        candidates = []
        if not self._ended:
            nc = self._source.next_candidate(self._stage)
            if nc is None:
                self._ended = True
            else:
                candidates.append(nc)
        while self._event_stages and self._event_stages[0] not in self._events:
            heapq.heappop(self._event_stages)
        if self._event_stages:
            candidates.append(self._event_stages[0])
        return min(candidates) if candidates else None

    def _fetch(self, s: int, fuel: Optional[int]) -> None:
        group = self._source.group_at(s)
        if group is END:
            self._ended = True
            return
        if group is IDLE:
            return
        members: Dict[Hashable, _Task] = {}
        fresh: List[_Task] = []
        for key, factory in group.tasks:
            if key in members:
                continue
            task = self._tasks.get(key)
            if task is None:
                task = self._start(key, factory(), s)
                if task.state == _OPEN:
                    fresh.append(task)
            members[key] = task
        if fresh and fuel is not None:
            self._run_tasks(fresh, fuel)

        pending = [t for t in members.values() if t.state != _HALTED]
        if any(t.state == _DIVERGENT for t in pending):
            return
        if not pending:
            self._succeed(_PendingGroup(s, group.payload, 0))
            return
        entry = _PendingGroup(s, group.payload, len(pending))
        for t in pending:
            t.waiting.append(entry)

    def _start(self, key, decider: SemiDecider, s: int) -> _Task:
        task = _Task(key, decider, s)
        self._tasks[key] = task
        self._live += 1
        fc = decider.forecast
        if fc.kind is ForecastKind.HALTS:
            self._schedule(task, fc.step)
        elif fc.kind is ForecastKind.DIVERGES:
            task.state = _DIVERGENT
        else:
            self._open.append(task)
        return task

    def _schedule(self, task: _Task, step: int) -> None:
        halt_stage = task.start + step - 1
        if halt_stage < self._stage:
            raise RuntimeError(f"{self.label}: task {task.key!r} would have halted in the past")
        task.state = _EVENT
        if halt_stage not in self._events:
            heapq.heappush(self._event_stages, halt_stage)
        self._events[halt_stage].append(task)

    def _run_tasks(self, tasks: List[_Task], fuel: int) -> None:
        if self._workers > 1 and len(tasks) > 1:
            with ThreadPoolExecutor(max_workers=self._workers) as pool:
                outcomes = list(pool.map(lambda t: t.decider.run(fuel), tasks))
        else:
            outcomes = [t.decider.run(fuel) for t in tasks]
        for task, outcome in zip(tasks, outcomes):
            if isinstance(outcome, Halted):
                self._open.remove(task)
                self._schedule(task, outcome.at_step)

    def _halt(self, task: _Task) -> None:
        task.state = _HALTED
        self._live -= 1
        for entry in task.waiting:
            entry.remaining -= 1
            if entry.remaining == 0:
                self._succeed(entry)
        task.waiting = []

    def _succeed(self, entry: _PendingGroup) -> None:
        if self._success is None or entry.stage < self._success.stage:
            self._success = entry


class DovetailDecider(SemiDecider):
    """SemiDecider backed by a Dovetailer; exposes the winning group"""

    def __init__(self, dovetailer: Dovetailer, label: str = ""):
        super().__init__(dovetailer.run, forecaster=dovetailer.forecast,
                         label=label or dovetailer.label)
        self.dovetailer = dovetailer

    @property
    def winner(self):
        return self.dovetailer.winner


# --- operations ------------------------------------------------------------

def evaluate(mp: MachineProcess, x: GeneralizedPoint, workers: int = 1) -> SemiDecider:
    """Dovetailed evaluation of a machine process at a generalized point"""
    if isinstance(mp, FormalProcess):
        if x.support is not None:
            step = mp.box_step(x.support)
            label = f"{mp.source} at {x.label}"
            return (SemiDecider.halting_at(step, label) if step is not None
                    else SemiDecider.never(label))
        sig = mp.signature(x)
        if sig is not None:
            return SemiDecider.from_forecast(mp.forecast_at(x, sig), label=f"{mp.source} at {x.label}")
    label = f"evaluate {getattr(mp, 'source', None) or mp!r} at {x.label}"
    return DovetailDecider(Dovetailer(BranchSource(mp, x), workers=workers, label=label))


def test_box(mp: MachineProcess, F: GeneralizedPoint, workers: int = 1) -> SemiDecider:
    """Semi-decide mp in the subbasic open of F, by evaluating at F"""
    return evaluate(mp, F, workers=workers)


# pytest would otherwise collect test_box as a test
test_box.__test__ = False


def evaluate_fuel_bound(m: FormalMachine) -> int:
    """
    Fuel after which evaluate(compile(m), p_F) has halted if it ever will,
    for any point halting in one step on its members.

    With k branches of at most s generators, stage j advances at most
    s * (j + 1) queries, so stages 0..k-1 cost at most k + s * k * (k + 1) / 2.
    """
    nm = normalize(m)
    k = max(1, len(nm.branches))
    s = nm.max_branch_size
    return k + s * k * (k + 1) // 2


class _RaceSource(GroupSource):
    def __init__(self, competitors: Sequence[SemiDecider]):
        self._competitors = list(competitors)

    @property
    def is_finite(self) -> bool:
        return True

    def next_candidate(self, stage: int) -> Optional[int]:
        return stage if stage < len(self._competitors) else None

    def group_at(self, stage: int) -> Union[Group, _Marker]:
        if stage >= len(self._competitors):
            return END
        decider = self._competitors[stage]
        return Group([(stage, lambda: decider)], payload=stage)


def race(*competitors: SemiDecider, workers: int = 1, label: str = "race") -> DovetailDecider:
    """Halts when any competitor halts; `winner` is the index of the first"""
    return DovetailDecider(Dovetailer(_RaceSource(competitors), workers=workers, label=label))
