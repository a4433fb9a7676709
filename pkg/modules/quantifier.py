"""
Universal and existential quantification over presented spaces.

forall(space, mp) semi-decides "mp halts on every point": it dovetails over
candidate covers S, and for each S that the space's cover decider accepts it
tests mp at the generalized point of every F in S. exists(space, mp) does the
same over positive basic opens.

Two strategies produce the candidates:

* "families" walks all finite families of finite sets of generators through
  SubsetEnumeration, skipping (as idle stages) families that are not an
  antichain of positive meets or that fail the cover guard. exists walks all
  finite sets with the positivity guard. Practical only for a handful of
  generators.
* "refinement" walks the space's uniform covers, emitting the depth-N cover
  at stage 4^N - 1, and for exists the space's countable positive base, one
  region per stage. Each region is tested at the generalized point of its
  up-closure.

Both halt exactly when the machine halts on all of (resp. some of) the space.
"""
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Callable, FrozenSet, List, Optional, Tuple, Union

from loguru import logger

from modules import config
from modules.cantor_spaces import word_index, words
from modules.error_handler import EnumerationCapError
from modules.generators import GeneratorId, PrefixGenerator
from modules.machine_runtime import (END, IDLE, DovetailDecider, Dovetailer, FormalProcess, Group,
                                     GroupSource, MachineProcess, compile_machine, evaluate, race,
                                     test_box)
from modules.machines import FormalMachine, FormalMeet, box_contains, normalize
from modules.points import generalized_point
from modules.semidecider import ForecastKind, GeneralizedPoint, Halted
from modules.space_interface import Presentation, Region, SpaceKind
from modules.space_registry import SpaceRef, get_space

STRATEGIES = config.COVER_STRATEGIES
MAX_WITNESS_DEPTH = 64

Family = FrozenSet[FrozenSet[GeneratorId]]


def _bits(n: int) -> List[int]:
    out, i = [], 0
    while n:
        if n & 1:
            out.append(i)
        n >>= 1
        i += 1
    return out


class SubsetEnumeration:
    """
    Ackermann coding of finite families of finite generator sets.

    Set j is {g_i : bit i of j is set}; family n is {set j : bit j of n is set},
    where g_i is the space's i-th generator. The codes below 2^(2^b) are
    exactly the families over the first b generators, so the order is by
    generator budget first.
    """

    def __init__(self, space: Presentation):
        self.space = space

    def set_at(self, j: int) -> FrozenSet[GeneratorId]:
        return frozenset(self.space.generator(i) for i in _bits(j))

    def set_index(self, F) -> int:
        return sum(1 << self.space.generator_index(g) for g in F)

    def family_at(self, n: int) -> Family:
        return frozenset(self.set_at(j) for j in _bits(n))

    def index_of(self, family) -> int:
        return sum(1 << self.set_index(F) for F in family)

    @staticmethod
    def budget(n: int) -> int:
        """Number of leading generators family n draws from, at most"""
        b = 0
        while n >= 1 << (1 << b):
            b += 1
        return b


@dataclass
class CoverFamily:
    """Families S over the first gen_bound generators whose join of meets is a cover"""
    space: str
    gen_bound: int
    size_bound: int
    members: List[Tuple[FrozenSet[GeneratorId], ...]] = field(default_factory=list)

    def contains(self, m: FormalMachine) -> bool:
        """m lies in the union over S of the intersection of the boxes of S's sets"""
        return any(all(box_contains(m, F) for F in S) for S in self.members)

    def __contains__(self, S) -> bool:
        key = frozenset(frozenset(F) for F in S)
        return any(frozenset(member) == key for member in self.members)

    def __len__(self):
        return len(self.members)


def cover_open(space: SpaceRef, gen_bound: int, size_bound: int,
               max_families: int = config.DEFAULT_MAX_FAMILIES) -> CoverFamily:
    """
    All families of at most size_bound non-empty sets over the first
    gen_bound generators that pass the space's cover decider.

    Raises:
        EnumerationCapError: If more than max_families families would be enumerated
    """
    sp = get_space(space)
    gens = sp.generators(gen_bound)
    sets = [frozenset(c) for r in range(1, gen_bound + 1) for c in combinations(gens, r)]
    total = sum(comb(len(sets), r) for r in range(1, size_bound + 1))
    if total > max_families:
        raise EnumerationCapError(
            f"cover_open over {gen_bound} generators and families of size <= {size_bound} "
            f"needs {total} candidates, cap is {max_families}")
    family = CoverFamily(sp.name, gen_bound, size_bound)
    for r in range(1, size_bound + 1):
        for S in combinations(sets, r):
            if sp.covers(sp.region_machine(S)):
                family.members.append(S)
    logger.info(f"cover_open {sp.name}: {len(family)} covers among {total} families")
    return family


def box_holds(space: Presentation, m: FormalMachine, region: Region) -> bool:
    """m is in the box of the up-closure of region"""
    support = space.up_closure(region)
    if support is not None:
        return box_contains(m, support)
    return any(all(space.up_closure_contains(region, g) for g in b.generators)
               for b in m.branches)


def _is_positive_antichain(space: Presentation, family: Family) -> bool:
    sets = list(family)
    if not all(space.positive(FormalMeet(F)) for F in sets):
        return False
    return not any(a < b for a in sets for b in sets)


def refinement_stage(depth: int) -> int:
    return 4 ** depth - 1


def _next_refinement_stage(stage: int) -> int:
    n = 0
    while refinement_stage(n) < stage:
        n += 1
    return refinement_stage(n)


class _RefinementCovers(GroupSource):
    def __init__(self, space: Presentation, mp: MachineProcess):
        self._space = space
        self._mp = mp

    def next_candidate(self, stage: int) -> Optional[int]:
        return _next_refinement_stage(stage)

    def group_at(self, stage: int):
        depth = (stage + 1).bit_length() // 2
        if refinement_stage(depth) != stage:
            return IDLE
        regions = self._space.uniform_cover(depth)
        return Group([(r, self._factory(r)) for r in regions], payload=regions)

    def _factory(self, region: Region):
        return lambda: test_box(self._mp, self._space.box_point(region))


class _FamilyCovers(GroupSource):
    def __init__(self, space: Presentation, mp: MachineProcess):
        self._space = space
        self._mp = mp
        self._enum = SubsetEnumeration(space)

    def group_at(self, stage: int):
        family = self._enum.family_at(stage)
        if not family or not _is_positive_antichain(self._space, family):
            return IDLE
        if not self._space.covers(self._space.region_machine(list(family))):
            return IDLE
        return Group([(F, self._factory(F)) for F in family], payload=family)

    def _factory(self, F):
        return lambda: test_box(self._mp, generalized_point(F))


def _halts_nowhere(mp: MachineProcess) -> bool:
    """A compiled machine with no branches accepts no point"""
    return isinstance(mp, FormalProcess) and not mp.branches


class _RefinementBase(GroupSource):
    def __init__(self, space: Presentation, mp: MachineProcess):
        self._space = space
        self._mp = mp

    def next_candidate(self, stage: int) -> Optional[int]:
        return None if _halts_nowhere(self._mp) else stage

    def group_at(self, stage: int):
        if _halts_nowhere(self._mp):
            return END
        region = self._space.positive_base(stage)
        return Group([(region, lambda: test_box(self._mp, self._space.box_point(region)))],
                     payload=region)


class _PositiveSets(GroupSource):
    def __init__(self, space: Presentation, mp: MachineProcess):
        self._space = space
        self._mp = mp
        self._enum = SubsetEnumeration(space)

    def next_candidate(self, stage: int) -> Optional[int]:
        return None if _halts_nowhere(self._mp) else stage

    def group_at(self, stage: int):
        if _halts_nowhere(self._mp):
            return END
        F = self._enum.set_at(stage)
        if not self._space.positive(FormalMeet(F)):
            return IDLE
        return Group([(F, lambda: test_box(self._mp, generalized_point(F)))], payload=F)


def _check_strategy(strategy: Optional[str]) -> str:
    strategy = strategy or "refinement"
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown cover strategy '{strategy}' (known: {', '.join(STRATEGIES)})")
    return strategy


def _as_process(space: Presentation, mp: Union[MachineProcess, FormalMachine]) -> MachineProcess:
    if isinstance(mp, FormalMachine):
        mp = compile_machine(mp)
    if mp.source is not None:
        space.check_machine(mp.source)
    return mp


def forall(space: SpaceRef, mp: Union[MachineProcess, FormalMachine], strategy: Optional[str] = None,
           workers: int = 1) -> DovetailDecider:
    """
    Semi-decide that mp halts on every point of a compact space.

    For a black-box process the guarantee holds when the process really is a
    machine over the space's generators; this is not checked.
    """
    sp = get_space(space)
    mp = _as_process(sp, mp)
    strategy = _check_strategy(strategy)
    source = _RefinementCovers(sp, mp) if strategy == "refinement" else _FamilyCovers(sp, mp)
    return DovetailDecider(Dovetailer(source, workers=workers, label=f"forall[{sp.name},{strategy}] {mp!r}"))


def exists(space: SpaceRef, mp: Union[MachineProcess, FormalMachine], strategy: Optional[str] = None,
           workers: int = 1) -> DovetailDecider:
    """Semi-decide that mp halts on some point of an overt space"""
    sp = get_space(space)
    mp = _as_process(sp, mp)
    strategy = _check_strategy(strategy)
    source = _RefinementBase(sp, mp) if strategy == "refinement" else _PositiveSets(sp, mp)
    return DovetailDecider(Dovetailer(source, workers=workers, label=f"exists[{sp.name},{strategy}] {mp!r}"))


# --- fuel bounds -----------------------------------------------------------

def _test_step(mp: MachineProcess, point: GeneralizedPoint) -> Optional[int]:
    fc = evaluate(mp, point).forecast
    return fc.step if fc.kind is ForecastKind.HALTS else None


def witness_depth(space: SpaceRef, m: FormalMachine, max_depth: int = MAX_WITNESS_DEPTH) -> Optional[int]:
    """
    Least depth whose uniform cover lies entirely inside m's boxes, or None
    if m is not a cover.

    Raises:
        EnumerationCapError: If a cover needs a depth beyond max_depth
    """
    sp = get_space(space)
    nm = normalize(m)
    if not sp.covers(nm):
        return None
    for depth in range(max_depth + 1):
        if all(box_holds(sp, nm, r) for r in sp.uniform_cover(depth)):
            return depth
    raise EnumerationCapError(f"no uniform cover of depth <= {max_depth} refines {m}")


def _first_index(test: Callable[[int], bool], cap: int, what: str) -> int:
    for n in range(cap):
        if test(n):
            return n
    raise EnumerationCapError(f"no {what} among the first {cap} candidates")


def _refinement_cover_fuel(space: Presentation, depth: int, h: int) -> int:
    T = refinement_stage(depth) + h - 1
    emitted = 0
    n = 0
    while refinement_stage(n) <= T:
        emitted += space.uniform_cover_size(n)
        n += 1
    return (T + 1) * (1 + emitted)


def _single_walk_fuel(n: int, h: int) -> int:
    T = n + h - 1
    return (T + 1) * (T + 2)


def sufficient_fuel(space: SpaceRef, m: FormalMachine, quantifier: str = "forall",
                    strategy: Optional[str] = None,
                    max_candidates: int = config.DEFAULT_MAX_FAMILIES) -> Optional[int]:
    """
    Fuel within which forall/exists on compile(m) has halted, or None when it
    never halts.

    If the winning group is fetched at stage n and its slowest test halts after
    h units, the run halts by stage T = n + h - 1. A stage costs one plus the
    number of live tasks, and at most L tasks exist by stage T, so the cost is
    at most (T + 1) * (1 + L). L is the number of regions emitted through T
    for refinement covers, T.bit_length() distinct sets for families, and
    T + 1 for the existential walks.
    """
    sp = get_space(space)
    strategy = _check_strategy(strategy)
    nm = normalize(m)
    mp = compile_machine(nm)

    if quantifier == "forall":
        if not sp.covers(nm):
            return None
        if strategy == "refinement":
            depth = witness_depth(sp, nm)
            h = max(_test_step(mp, sp.box_point(r)) for r in sp.uniform_cover(depth))
            return _refinement_cover_fuel(sp, depth, h)
        enum = SubsetEnumeration(sp)

        def wins(n: int) -> bool:
            family = enum.family_at(n)
            return (bool(family) and _is_positive_antichain(sp, family)
                    and sp.covers(sp.region_machine(list(family)))
                    and all(box_contains(nm, F) for F in family))

        n = _first_index(wins, max_candidates, "covering family")
        h = max(_test_step(mp, generalized_point(F)) for F in enum.family_at(n))
        T = n + h - 1
        return (T + 1) * (1 + T.bit_length())

    if quantifier != "exists":
        raise ValueError(f"unknown quantifier '{quantifier}'")
    if not any(sp.positive(b) for b in nm.branches):
        return None
    if strategy == "refinement":
        n = _first_index(lambda i: box_holds(sp, nm, sp.positive_base(i)), max_candidates, "base region")
        h = _test_step(mp, sp.box_point(sp.positive_base(n)))
    else:
        enum = SubsetEnumeration(sp)
        n = _first_index(lambda j: sp.positive(FormalMeet(enum.set_at(j)))
                         and box_contains(nm, enum.set_at(j)), max_candidates, "positive set")
        h = _test_step(mp, generalized_point(enum.set_at(n)))
    return _single_walk_fuel(n, h)


# --- stream search ---------------------------------------------------------

def cantor_search(pred: Callable[[str], bool], d: int, workers: int = 1) -> Optional[str]:
    """
    Some word w of length d with pred(w), or None.

    Builds the prefix machines of accepted and rejected words and races
    forall on the rejecting machine against exists on the accepting one.
    Exactly one of them halts.
    """
    prefix = get_space(SpaceKind.CANTOR_PREFIX)
    accepted, rejected = [], []
    for w in words(d):
        (accepted if pred(w) else rejected).append(w)
    m_true = FormalMachine.of(*[[PrefixGenerator(w)] for w in accepted])
    m_false = FormalMachine.of(*[[PrefixGenerator(w)] for w in rejected])

    all_rejected = forall(prefix, m_false, workers=workers)
    some_accepted = exists(prefix, m_true, workers=workers)
    contest = race(all_rejected, some_accepted, workers=workers, label=f"search d={d}")

    # The first base region inside m_true is the least accepted word; when
    # nothing is accepted the depth-d cover is the first one inside m_false.
    if accepted:
        region = frozenset([PrefixGenerator(accepted[0])])
        h = _test_step(compile_machine(m_true), prefix.box_point(region))
        bound = _single_walk_fuel(word_index(accepted[0]), h)
    else:
        mp = compile_machine(m_false)
        h = max(_test_step(mp, prefix.box_point(r)) for r in prefix.uniform_cover(d))
        bound = _refinement_cover_fuel(prefix, d, h)
    fuel = 3 * (bound + 1)
    outcome = contest.run(fuel)
    if not isinstance(outcome, Halted):
        raise RuntimeError(f"search at depth {d} did not halt within {fuel}")
    if contest.winner == 0:
        logger.info(f"cantor_search d={d}: no witness (step {outcome.at_step})")
        return None
    word = prefix.region_word(some_accepted.winner)[:d]
    logger.info(f"cantor_search d={d}: witness {word} (step {outcome.at_step})")
    return word
