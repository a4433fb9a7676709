"""
Concrete points and explicit generalized points.

Cantor points are binary streams read through a query budget; interval
points are exact rationals. `generalized_point` builds p_F for a finite or
intensional set of generators.
"""
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, Optional, Union

from modules import config
from modules.error_handler import BudgetExceededError, GeneratorMismatchError
from modules.generators import GeneratorId
from modules.semidecider import GeneralizedPoint, membership_point


class BinaryStream:
    """
    Total function from positions to {0, 1}, read with a query budget.

    Digits are computed at most once and then served from a cache, so repeated
    queries agree even if the underlying function does not memoize.
    """

    def __init__(self, digits: Callable[[int], int], budget: int = config.DEFAULT_STREAM_BUDGET,
                 label: str = ""):
        self._digits = digits
        self.budget = budget
        self.label = label or "stream"
        self._cache: Dict[int, int] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_word(cls, word: str, pad: int = 0,
                  budget: int = config.DEFAULT_STREAM_BUDGET) -> "BinaryStream":
        """The stream word, pad, pad, ..."""
        bits = [int(c) for c in word]
        return cls(lambda n: bits[n] if n < len(bits) else pad, budget=budget,
                   label=f"{word}{pad}...")

    def digit(self, n: int) -> int:
        if n >= self.budget:
            raise BudgetExceededError(
                f"{self.label}: digit {n} requested, query budget is {self.budget}")
        with self._lock:
            value = self._cache.get(n)
        if value is None:
            value = self._digits(n)
            if value not in (0, 1):
                raise ValueError(f"{self.label}: digit {n} is {value!r}, not 0 or 1")
            with self._lock:
                self._cache[n] = value
        return value

    def prefix(self, length: int) -> str:
        return "".join(str(self.digit(n)) for n in range(length))

    def __repr__(self):
        return f"<BinaryStream {self.label}>"


@dataclass(frozen=True)
class RationalPoint:
    value: Fraction

    def __post_init__(self):
        value = Fraction(self.value)
        if not (0 <= value <= 1):
            raise GeneratorMismatchError(f"point {value} lies outside [0, 1]")
        object.__setattr__(self, "value", value)

    def __str__(self):
        return str(self.value)


ConcretePoint = Union[BinaryStream, RationalPoint]


def generalized_point(F: Optional[Iterable[GeneratorId]] = None,
                      membership: Optional[Callable[[GeneratorId], bool]] = None,
                      label: str = "") -> GeneralizedPoint:
    """
    p_F: halts in one step exactly on the generators of F.

    Pass a finite F, or a membership predicate for intensional sets such as
    all z_n.
    """
    if (F is None) == (membership is None):
        raise ValueError("give exactly one of F or membership")
    if F is not None:
        members: FrozenSet[GeneratorId] = frozenset(F)
        label = label or "{" + ",".join(g.to_text() for g in sorted(members, key=lambda g: g.sort_key)) + "}"
        return membership_point(members.__contains__, label=label, support=members)
    return membership_point(membership, label=label or "intensional")
