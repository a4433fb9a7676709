"""
The unit interval presented by rational intervals (a, b), 0 <= a < b <= 1.

Generators are read as subspace traces on [0, 1]: a = 0 includes 0 and b = 1
includes 1, all other endpoints are open. Without this no finite join could
contain the endpoints. Points are exact rationals, so membership is decided
by comparison.
"""
from fractions import Fraction
from math import gcd, isqrt
from typing import FrozenSet, Iterable, List, Optional, Tuple

from modules.error_handler import GeneratorMismatchError
from modules.generators import GeneratorId, IntervalGenerator
from modules.machines import FormalMachine, FormalMeet, Relation
from modules.points import RationalPoint
from modules.semidecider import GeneralizedPoint, SemiDecider
from modules.space_interface import Presentation, Region, SpaceKind

Span = Tuple[Fraction, Fraction]


def _coprime_numerators(d: int) -> List[int]:
    return [p for p in range(1, d) if gcd(p, d) == 1]


def rational_at(i: int) -> Fraction:
    """i-th rational in [0, 1]: 0, 1, then by denominator and numerator"""
    if i < 2:
        return Fraction(i)
    i -= 2
    d = 2
    while True:
        nums = _coprime_numerators(d)
        if i < len(nums):
            return Fraction(nums[i], d)
        i -= len(nums)
        d += 1


def rational_index(q: Fraction) -> int:
    if q == 0 or q == 1:
        return int(q)
    d = q.denominator
    before = 2 + sum(len(_coprime_numerators(e)) for e in range(2, d))
    return before + sum(1 for p in range(1, q.numerator) if gcd(p, d) == 1)


def meet_span(b: FormalMeet) -> Optional[Span]:
    """Exact intersection of a meet of intervals, or None when it is empty"""
    if b.is_top:
        return Fraction(0), Fraction(1)
    lo = max(g.lo for g in b.generators)
    hi = min(g.hi for g in b.generators)
    return (lo, hi) if lo < hi else None


def _require_rational(x) -> Fraction:
    if isinstance(x, RationalPoint):
        return x.value
    raise GeneratorMismatchError(f"interval points are exact rationals, got {x!r}")


class UnitInterval(Presentation):
    kind = SpaceKind.UNIT_INTERVAL
    description = "[0, 1], generators are rational intervals"
    point_type = "RationalPoint"

    def generator(self, n: int) -> IntervalGenerator:
        # pairs (j, k) with j < k, listed by k
        k = (1 + isqrt(1 + 8 * n)) // 2
        while k * (k - 1) // 2 > n:
            k -= 1
        while (k + 1) * k // 2 <= n:
            k += 1
        j = n - k * (k - 1) // 2
        a, b = rational_at(j), rational_at(k)
        return IntervalGenerator(min(a, b), max(a, b))

    def generator_index(self, g: GeneratorId) -> int:
        self.check_generator(g)
        j, k = sorted((rational_index(g.lo), rational_index(g.hi)))
        return k * (k - 1) // 2 + j

    def leq(self, g: GeneratorId, h: GeneratorId) -> bool:
        return (isinstance(g, IntervalGenerator) and isinstance(h, IntervalGenerator)
                and h.lo <= g.lo and g.hi <= h.hi)

    def up_closure(self, F: Iterable[GeneratorId]) -> Optional[FrozenSet[GeneratorId]]:
        F = frozenset(F)
        return F if not F else None

    def relations(self, bound: int) -> List[Relation]:
        """
        Finite fragment over the first `bound` generators: (0, 1) is top,
        binary meets are exact intersections, and overlapping pairs join to
        their union. The infinitary relation expressing (a, b) as the join of
        the intervals strictly inside it is left out.
        """
        gens = self.generators(bound)
        rels = [Relation(FormalMachine.atom(IntervalGenerator(Fraction(0), Fraction(1))),
                         FormalMachine.top())]
        for i, g in enumerate(gens):
            for h in gens[i + 1:]:
                span = meet_span(FormalMeet.of(g, h))
                pair = FormalMachine.of([g, h])
                if span is None:
                    rels.append(Relation(pair, FormalMachine.bottom()))
                    continue
                rels.append(Relation(pair, FormalMachine.atom(IntervalGenerator(*span))))
                union = IntervalGenerator(min(g.lo, h.lo), max(g.hi, h.hi))
                rels.append(Relation(FormalMachine.of([g], [h]), FormalMachine.atom(union)))
        return rels

    def covers(self, m: FormalMachine) -> bool:
        """
        Endpoint chaining over the non-empty branch intersections: start from
        an interval containing 0, extend the reach r by any interval whose
        lower end is strictly below r, succeed when r reaches 1.
        """
        self.check_machine(m)
        spans = sorted(s for s in (meet_span(b) for b in m.branches) if s is not None)
        starts = [hi for lo, hi in spans if lo == 0]
        if not starts:
            return False
        reach = max(starts)
        for lo, hi in spans:
            if reach == 1:
                break
            if lo >= reach:
                return False
            reach = max(reach, hi)
        return reach == 1

    def positive(self, b: FormalMeet) -> bool:
        self.check_meet(b)
        return meet_span(b) is not None

    def embed(self, x) -> GeneralizedPoint:
        value = _require_rational(x)
        halt, never = SemiDecider.halting_at(1), SemiDecider.never()

        def query(g: GeneratorId) -> SemiDecider:
            self.check_generator(g)
            return halt if g.contains(value) else never

        return GeneralizedPoint(query, label=f"i({value})")

    def contains(self, x, g: GeneratorId) -> bool:
        self.check_generator(g)
        return g.contains(_require_rational(x))

    def sample_points(self, depth: int) -> List[RationalPoint]:
        n = 1 << (depth + 1)
        return [RationalPoint(Fraction(k, n)) for k in range(n + 1)]

    def critical_points(self, m: FormalMachine) -> List[RationalPoint]:
        """Endpoints of m's generators, 0, 1 and every midpoint between them"""
        ends = {Fraction(0), Fraction(1)}
        for g in m.generators:
            ends.update((g.lo, g.hi))
        ordered = sorted(ends)
        mids = [(a + b) / 2 for a, b in zip(ordered, ordered[1:])]
        return [RationalPoint(q) for q in sorted(ends.union(mids))]

    def uniform_cover(self, depth: int) -> List[Region]:
        """Overlapping intervals ((k-1)/2^N, (k+1)/2^N) clipped to [0, 1]"""
        n = 1 << depth
        seen = []
        for k in range(n + 1):
            g = IntervalGenerator(max(Fraction(0), Fraction(k - 1, n)), min(Fraction(1), Fraction(k + 1, n)))
            region = frozenset([g])
            if region not in seen:
                seen.append(region)
        return seen

    def uniform_cover_size(self, depth: int) -> int:
        return 1 if depth == 0 else (1 << depth) + 1

    def positive_base(self, i: int) -> Region:
        """Dyadic intervals (k/2^N, (k+1)/2^N), by depth N and then k"""
        depth = (i + 1).bit_length() - 1
        n = 1 << depth
        k = i + 1 - n
        return frozenset([IntervalGenerator(Fraction(k, n), Fraction(k + 1, n))])
