"""
Formal machines: finite joins of finite meets of generators.

A FormalMeet is a finite set of generators (the empty meet is top); a
FormalMachine is a finite set of meets (the empty join is bottom). Both are
immutable. Joins and meets check that every generator comes from one
presentation.
"""
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import FrozenSet, Iterable, Iterator, List, Optional, Tuple

from modules.error_handler import IncompatiblePresentationError
from modules.generators import GeneratorId


def _common_tag(tags: Iterable[Optional[str]]) -> Optional[str]:
    found: Optional[str] = None
    for tag in tags:
        if tag is None:
            continue
        if found is None:
            found = tag
        elif tag != found:
            raise IncompatiblePresentationError(
                f"generators from '{found}' and '{tag}' cannot be combined")
    return found


@dataclass(frozen=True)
class FormalMeet:
    generators: FrozenSet[GeneratorId] = frozenset()

    def __post_init__(self):
        gens = frozenset(self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "_tag", _common_tag(g.space_tag for g in gens))

    @classmethod
    def of(cls, *generators: GeneratorId) -> "FormalMeet":
        return cls(frozenset(generators))

    @property
    def space_tag(self) -> Optional[str]:
        return self._tag

    @property
    def is_top(self) -> bool:
        return not self.generators

    def ordered(self) -> Tuple[GeneratorId, ...]:
        return tuple(sorted(self.generators, key=lambda g: g.sort_key))

    @property
    def sort_key(self) -> Tuple:
        return (len(self.generators), tuple(g.sort_key for g in self.ordered()))

    def issubset(self, other: Iterable[GeneratorId]) -> bool:
        return self.generators.issubset(other)

    def union(self, other: "FormalMeet") -> "FormalMeet":
        return FormalMeet(self.generators | other.generators)

    def __len__(self):
        return len(self.generators)

    def __iter__(self) -> Iterator[GeneratorId]:
        return iter(self.ordered())

    def to_text(self) -> str:
        if self.is_top:
            return "T"
        return " & ".join(g.to_text() for g in self.ordered())

    def __str__(self):
        return self.to_text()


TOP_MEET = FormalMeet()


@dataclass(frozen=True)
class FormalMachine:
    branches: FrozenSet[FormalMeet] = frozenset()

    def __post_init__(self):
        branches = frozenset(self.branches)
        object.__setattr__(self, "branches", branches)
        object.__setattr__(self, "_tag", _common_tag(b.space_tag for b in branches))

    @classmethod
    def of(cls, *branches: Iterable[GeneratorId]) -> "FormalMachine":
        """Build from branches given as meets or plain generator collections"""
        return cls(frozenset(b if isinstance(b, FormalMeet) else FormalMeet(frozenset(b))
                             for b in branches))

    @classmethod
    def atom(cls, generator: GeneratorId) -> "FormalMachine":
        return cls(frozenset([FormalMeet.of(generator)]))

    @classmethod
    def bottom(cls) -> "FormalMachine":
        return cls()

    @classmethod
    def top(cls) -> "FormalMachine":
        return cls(frozenset([TOP_MEET]))

    @property
    def space_tag(self) -> Optional[str]:
        return self._tag

    @property
    def is_bottom(self) -> bool:
        return not self.branches

    @property
    def generators(self) -> FrozenSet[GeneratorId]:
        out = set()
        for b in self.branches:
            out.update(b.generators)
        return frozenset(out)

    @property
    def max_branch_size(self) -> int:
        return max((len(b) for b in self.branches), default=0)

    def ordered_branches(self) -> List[FormalMeet]:
        return sorted(self.branches, key=lambda b: b.sort_key)

    def to_text(self) -> str:
        if self.is_bottom:
            return "F"
        return " | ".join(b.to_text() for b in self.ordered_branches())

    def __str__(self):
        return self.to_text()

    def __len__(self):
        return len(self.branches)


class RelationKind(Enum):
    EQUALITY = "="
    INEQUALITY = "<="


@dataclass(frozen=True)
class Relation:
    """lhs = rhs or lhs <= rhs in a presentation"""
    lhs: FormalMachine
    rhs: FormalMachine
    kind: RelationKind = RelationKind.EQUALITY

    def __post_init__(self):
        _common_tag([self.lhs.space_tag, self.rhs.space_tag])

    def __str__(self):
        return f"{self.lhs} {self.kind.value} {self.rhs}"


# branches this small are checked by looking up their subsets instead of scanning
_SUBSET_LOOKUP_LIMIT = 8


def _absorbed(gens: FrozenSet[GeneratorId], kept: List[FormalMeet], kept_sets: set) -> bool:
    if len(gens) <= _SUBSET_LOOKUP_LIMIT:
        return any(frozenset(c) in kept_sets for r in range(len(gens)) for c in combinations(gens, r))
    return any(k.generators < gens for k in kept)


def normalize(m: FormalMachine) -> FormalMachine:
    """Absorption normal form: drop every branch that strictly contains another"""
    kept: List[FormalMeet] = []
    kept_sets = set()
    for branch in sorted(m.branches, key=lambda b: len(b)):
        if not _absorbed(branch.generators, kept, kept_sets):
            kept.append(branch)
            kept_sets.add(branch.generators)
    return FormalMachine(frozenset(kept))


def distribute(a: FormalMachine, b: FormalMachine) -> FormalMachine:
    """Pairwise branch unions, without absorption"""
    _common_tag([a.space_tag, b.space_tag])
    return FormalMachine(frozenset(x.union(y) for x in a.branches for y in b.branches))


def meet(a: FormalMachine, b: FormalMachine) -> FormalMachine:
    return normalize(distribute(a, b))


def join(a: FormalMachine, b: FormalMachine) -> FormalMachine:
    _common_tag([a.space_tag, b.space_tag])
    return normalize(FormalMachine(a.branches | b.branches))


def join_all(machines: Iterable[FormalMachine]) -> FormalMachine:
    result = FormalMachine.bottom()
    for m in machines:
        result = join(result, m)
    return result


def meet_all(machines: Iterable[FormalMachine]) -> FormalMachine:
    result = FormalMachine.top()
    for m in machines:
        result = meet(result, m)
    return result


def box_contains(m: FormalMachine, F: Iterable[GeneratorId]) -> bool:
    """True iff some branch of m lies inside F, i.e. m is in the subbasic open for F"""
    fset = F if isinstance(F, (set, frozenset)) else frozenset(F)
    return any(b.generators <= fset for b in m.branches)
