"""
Generator identifiers for the built-in presentations.

A generator names a subbasic open. Each kind fixes its owning presentation:
digit generators z_n / u_n belong to Cantor space presented by digits,
prefix generators l_w to Cantor space presented by prefixes, and rational
intervals (a, b) to the unit interval. Opaque generators carry an explicit
tag and are used by the finite oracle and by user extensions.

All generators are immutable and hashable, and expose a `sort_key` that fixes
the canonical order used in printed output.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Tuple, Union

from modules import config
from modules.error_handler import InvalidGeneratorError

RationalLike = Union[int, Fraction, str]


class Polarity(Enum):
    """Digit value a digit generator asserts: z_n says bit n is 0, u_n says 1"""
    ZERO = "z"
    ONE = "u"

    @property
    def bit(self) -> int:
        return 0 if self is Polarity.ZERO else 1

    @classmethod
    def from_bit(cls, bit: int) -> "Polarity":
        return cls.ZERO if bit == 0 else cls.ONE


class GeneratorId(ABC):
    """Abstract generator; concrete kinds are frozen dataclasses below"""

    # Rank among kinds in the canonical order
    kind_rank: int = 99

    @property
    @abstractmethod
    def space_tag(self) -> str:
        """Name of the presentation this generator belongs to"""

    @property
    @abstractmethod
    def sort_key(self) -> Tuple:
        """Canonical ordering key (kind rank first)"""

    @abstractmethod
    def to_text(self) -> str:
        """Surface syntax accepted by the machine parser"""

    def __str__(self):
        return self.to_text()

    def __lt__(self, other: "GeneratorId") -> bool:
        return self.sort_key < other.sort_key


@dataclass(frozen=True, eq=True)
class DigitGenerator(GeneratorId):
    index: int
    polarity: Polarity

    kind_rank = 0

    def __post_init__(self):
        if not isinstance(self.index, int) or isinstance(self.index, bool) or self.index < 0:
            raise InvalidGeneratorError(f"digit index must be a natural number, got {self.index!r}")
        if not isinstance(self.polarity, Polarity):
            raise InvalidGeneratorError(f"bad polarity {self.polarity!r}")

    @property
    def space_tag(self) -> str:
        return config.SPACE_CANTOR_DIGITS

    @property
    def sort_key(self) -> Tuple:
        return (self.kind_rank, self.index, self.polarity.bit)

    @property
    def bit(self) -> int:
        return self.polarity.bit

    def opposite(self) -> "DigitGenerator":
        """The generator disjoint from this one at the same index"""
        return DigitGenerator(self.index, Polarity.from_bit(1 - self.bit))

    def to_text(self) -> str:
        return f"{self.polarity.value}{self.index}"


@dataclass(frozen=True, eq=True)
class PrefixGenerator(GeneratorId):
    word: str

    kind_rank = 1

    def __post_init__(self):
        if not isinstance(self.word, str) or any(c not in "01" for c in self.word):
            raise InvalidGeneratorError(f"prefix word must be a binary string, got {self.word!r}")

    @property
    def space_tag(self) -> str:
        return config.SPACE_CANTOR_PREFIX

    @property
    def sort_key(self) -> Tuple:
        return (self.kind_rank, len(self.word), self.word)

    def extends(self, other: "PrefixGenerator") -> bool:
        """True if other's word is a prefix of this word (l_self <= l_other)"""
        return self.word.startswith(other.word)

    def to_text(self) -> str:
        return f'l"{self.word}"'


def _as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, float):
        raise InvalidGeneratorError(f"interval endpoints must be exact rationals, got float {value!r}")
    if isinstance(value, bool):
        raise InvalidGeneratorError(f"bad endpoint {value!r}")
    if isinstance(value, (Rational, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidGeneratorError(f"bad rational {value!r}: {e}") from e
    raise InvalidGeneratorError(f"bad endpoint {value!r}")


@dataclass(frozen=True, eq=True)
class IntervalGenerator(GeneratorId):
    """
    Rational interval (lo, hi) with 0 <= lo < hi <= 1.

    Read as a subspace trace on [0, 1]: lo == 0 includes 0 and hi == 1
    includes 1; every other endpoint is open.
    """
    lo: Fraction
    hi: Fraction

    kind_rank = 2

    def __post_init__(self):
        lo = _as_fraction(self.lo)
        hi = _as_fraction(self.hi)
        if not (0 <= lo < hi <= 1):
            raise InvalidGeneratorError(f"interval needs 0 <= lo < hi <= 1, got ({lo}, {hi})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def space_tag(self) -> str:
        return config.SPACE_INTERVAL

    @property
    def sort_key(self) -> Tuple:
        return (self.kind_rank, self.lo, self.hi)

    def contains(self, x: Fraction) -> bool:
        """Membership of an exact rational under the subspace-trace reading"""
        above = x > self.lo or (self.lo == 0 and x == 0)
        below = x < self.hi or (self.hi == 1 and x == 1)
        return above and below

    def to_text(self) -> str:
        return f"i({self.lo},{self.hi})"


@dataclass(frozen=True, eq=True)
class OpaqueGenerator(GeneratorId):
    """Generator with no built-in meaning, identified by (tag, index)"""
    tag: str
    index: int

    kind_rank = 3

    def __post_init__(self):
        if not self.tag:
            raise InvalidGeneratorError("opaque generator needs a tag")
        if not isinstance(self.index, int) or isinstance(self.index, bool) or self.index < 0:
            raise InvalidGeneratorError(f"opaque index must be a natural number, got {self.index!r}")

    @property
    def space_tag(self) -> str:
        return self.tag

    @property
    def sort_key(self) -> Tuple:
        return (self.kind_rank, self.tag, self.index)

    def to_text(self) -> str:
        # Not part of the parser grammar
        return f"{self.tag}#{self.index}"


def z(index: int) -> DigitGenerator:
    return DigitGenerator(index, Polarity.ZERO)


def u(index: int) -> DigitGenerator:
    return DigitGenerator(index, Polarity.ONE)


def ell(word: str) -> PrefixGenerator:
    return PrefixGenerator(word)


def interval(lo: RationalLike, hi: RationalLike) -> IntervalGenerator:
    return IntervalGenerator(_as_fraction(lo), _as_fraction(hi))
