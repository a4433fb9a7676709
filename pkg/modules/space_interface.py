"""
Presentation interface for built-in spaces.

A presentation fixes a countable generator universe (with an enumeration and
a partial order), a relation schema, and exact decision procedures for the
two syntactic questions the quantifiers ask: is a formal machine a cover of
the whole space, and is a formal meet positive. It also knows how to embed
concrete points as generalized points.
"""
from abc import ABC, abstractmethod
from enum import Enum
from typing import FrozenSet, Iterable, List, Optional, Sequence

from modules import config
from modules.error_handler import GeneratorMismatchError
from modules.generators import GeneratorId
from modules.machines import FormalMachine, FormalMeet, Relation
from modules.semidecider import GeneralizedPoint, membership_point


class SpaceKind(Enum):
    CANTOR_DIGITS = config.SPACE_CANTOR_DIGITS
    CANTOR_PREFIX = config.SPACE_CANTOR_PREFIX
    UNIT_INTERVAL = config.SPACE_INTERVAL

    @classmethod
    def parse(cls, name: str) -> "SpaceKind":
        try:
            return cls(name)
        except ValueError:
            known = ", ".join(k.value for k in cls)
            raise GeneratorMismatchError(f"unknown space '{name}' (known: {known})") from None


# A basic region is a finite meet of generators; its box point is the
# generalized point of the up-closure of that meet.
Region = FrozenSet[GeneratorId]


class Presentation(ABC):
    """
    Base class for presented spaces.

    Subclasses define the metadata attributes and implement the abstract
    methods. Instances are stateless and may be shared between threads.

    Example:
        class SierpinskiSpace(Presentation):
            kind = ...
            description = "one open point"

            def generator(self, n):
                return OpaqueGenerator("sierpinski", n)
            ...
    """

    kind: SpaceKind = None
    description: str = ""
    # Name of the concrete point type accepted by embed()
    point_type: str = ""

    @property
    def name(self) -> str:
        return self.kind.value

    # --- generator universe ---

    @abstractmethod
    def generator(self, n: int) -> GeneratorId:
        """
        The n-th generator. Total and injective on the naturals, and onto the
        generator universe.
        """

    @abstractmethod
    def generator_index(self, g: GeneratorId) -> int:
        """Inverse of generator()"""

    def generators(self, count: int) -> List[GeneratorId]:
        return [self.generator(n) for n in range(count)]

    def leq(self, g: GeneratorId, h: GeneratorId) -> bool:
        """Generator order (g <= h means the open g lies inside h). Discrete by default."""
        return g == h

    def up_closure_contains(self, F: Iterable[GeneratorId], g: GeneratorId) -> bool:
        """Membership of g in the up-closure of F under leq"""
        return any(self.leq(f, g) for f in F)

    def up_closure(self, F: Iterable[GeneratorId]) -> Optional[FrozenSet[GeneratorId]]:
        """The up-closure of F as a finite set, or None when it is infinite"""
        return frozenset(F)

    @abstractmethod
    def relations(self, bound: int) -> List[Relation]:
        """Relations of the presentation mentioning only generators up to `bound`"""

    # --- deciders ---

    @abstractmethod
    def covers(self, m: FormalMachine) -> bool:
        """
        Exact decision of whether m denotes top.

        Raises:
            GeneratorMismatchError: If m uses generators of another space
        """

    @abstractmethod
    def positive(self, b: FormalMeet) -> bool:
        """
        Exact decision of whether the meet b is not bottom.

        Raises:
            GeneratorMismatchError: If b uses generators of another space
        """

    # --- points ---

    @abstractmethod
    def embed(self, x) -> GeneralizedPoint:
        """The generalized point halting on exactly the generators x lies in"""

    @abstractmethod
    def contains(self, x, g: GeneratorId) -> bool:
        """Denotational membership of a concrete point in a generator"""

    def accepts(self, x, m: FormalMachine) -> bool:
        """Denotational membership of x in the open m"""
        return any(all(self.contains(x, g) for g in b.generators) for b in m.branches)

    @abstractmethod
    def sample_points(self, depth: int) -> list:
        """A finite family of points, dense in the limit of depth"""

    # --- bases for the quantifiers ---

    @abstractmethod
    def uniform_cover(self, depth: int) -> List[Region]:
        """
        A finite cover by basic regions, refining as depth grows: every finite
        cover of the space is refined by uniform_cover(N) for some N.
        """

    def uniform_cover_size(self, depth: int) -> int:
        return len(self.uniform_cover(depth))

    @abstractmethod
    def positive_base(self, i: int) -> Region:
        """
        The i-th region of a countable base of positive basic opens.
        Every positive formal meet contains some region of the base.
        """

    def box_point(self, F: Iterable[GeneratorId], label: str = "") -> GeneralizedPoint:
        """Generalized point of the up-closure of F"""
        F = frozenset(F)
        label = label or "{" + ",".join(g.to_text() for g in sorted(F, key=lambda g: g.sort_key)) + "}"
        support = self.up_closure(F)
        if support is not None:
            return membership_point(support.__contains__, label=label, support=support)
        return membership_point(lambda g: g.space_tag == self.name and self.up_closure_contains(F, g),
                                label=label)

    # --- validation ---

    def check_generator(self, g: GeneratorId) -> None:
        if g.space_tag != self.name:
            raise GeneratorMismatchError(f"generator {g} belongs to '{g.space_tag}', not '{self.name}'")

    def check_machine(self, m: FormalMachine) -> None:
        if m.space_tag is not None and m.space_tag != self.name:
            raise GeneratorMismatchError(f"machine over '{m.space_tag}' used with space '{self.name}'")

    def check_meet(self, b: FormalMeet) -> None:
        if b.space_tag is not None and b.space_tag != self.name:
            raise GeneratorMismatchError(f"meet over '{b.space_tag}' used with space '{self.name}'")

    def region_machine(self, regions: Sequence[Region]) -> FormalMachine:
        """The formal join of the meets of the given regions"""
        return FormalMachine(frozenset(FormalMeet(r) for r in regions))

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"
