"""
Cantor space 2^N under two presentations.

CantorDigits uses generators z_n ("digit n is 0") and u_n ("digit n is 1")
with z_n & u_n = 0 and z_n | u_n = 1. CantorPrefix uses generators l_p
("the stream starts with p"), ordered by l_q <= l_p when p is a prefix of q,
with l_p & l_q = l_q for p a prefix of q, l_p & l_q = 0 for incomparable p, q,
l_p0 | l_p1 = l_p, and l_e = 1 for the empty word e.
"""
from itertools import product
from typing import FrozenSet, Iterable, List, Optional

from modules.generators import DigitGenerator, GeneratorId, Polarity, PrefixGenerator
from modules.machines import FormalMachine, FormalMeet, Relation, normalize
from modules.points import BinaryStream
from modules.semidecider import GeneralizedPoint, SemiDecider
from modules.error_handler import GeneratorMismatchError
from modules.space_interface import Presentation, Region, SpaceKind


def words(length: int) -> List[str]:
    """All binary words of the given length, in lexicographic order"""
    return ["".join(bits) for bits in product("01", repeat=length)]


def word_at(i: int) -> str:
    """i-th binary word in length-lexicographic order (0 -> empty word)"""
    return bin(i + 1)[3:]


def word_index(word: str) -> int:
    return int("1" + word, 2) - 1


def digit_region(word: str) -> Region:
    """The digit meet fixing the first len(word) digits to word"""
    return frozenset(DigitGenerator(i, Polarity.from_bit(int(c))) for i, c in enumerate(word))


def _require_stream(x) -> BinaryStream:
    if not isinstance(x, BinaryStream):
        raise GeneratorMismatchError(f"Cantor space points are binary streams, got {x!r}")
    return x


class CantorDigits(Presentation):
    kind = SpaceKind.CANTOR_DIGITS
    description = "Cantor space, generators z_n and u_n"
    point_type = "BinaryStream"

    def generator(self, n: int) -> DigitGenerator:
        return DigitGenerator(n // 2, Polarity.from_bit(n % 2))

    def generator_index(self, g: GeneratorId) -> int:
        self.check_generator(g)
        return 2 * g.index + g.bit

    def relations(self, bound: int) -> List[Relation]:
        rels = []
        for i in range(bound):
            z, u = self.generator(2 * i), self.generator(2 * i + 1)
            rels.append(Relation(FormalMachine.of([z, u]), FormalMachine.bottom()))
            rels.append(Relation(FormalMachine.of([z], [u]), FormalMachine.top()))
        return rels

    def covers(self, m: FormalMachine) -> bool:
        """
        Conjunctive normal form by distribution, dropping every clause that
        contains both z_i and u_i as soon as it appears. m is a cover iff no
        clause survives.
        """
        self.check_machine(m)
        clauses = {frozenset()}
        for branch in normalize(m).ordered_branches():
            grown = set()
            for clause in clauses:
                for g in branch.generators:
                    if g.opposite() not in clause:
                        grown.add(clause | {g})
            clauses = _minimal_sets(grown)
            if not clauses:
                return True
        return not clauses

    def positive(self, b: FormalMeet) -> bool:
        self.check_meet(b)
        return not any(g.opposite() in b.generators for g in b.generators)

    def embed(self, x) -> GeneralizedPoint:
        stream = _require_stream(x)
        halt, never = SemiDecider.halting_at(1), SemiDecider.never()

        def query(g: GeneratorId) -> SemiDecider:
            self.check_generator(g)
            return halt if stream.digit(g.index) == g.bit else never

        return GeneralizedPoint(query, label=f"i({stream.label})")

    def contains(self, x, g: GeneratorId) -> bool:
        self.check_generator(g)
        return _require_stream(x).digit(g.index) == g.bit

    def sample_points(self, depth: int) -> List[BinaryStream]:
        return [BinaryStream.from_word(w) for w in words(depth)]

    def uniform_cover(self, depth: int) -> List[Region]:
        return [digit_region(w) for w in words(depth)]

    def uniform_cover_size(self, depth: int) -> int:
        return 1 << depth

    def positive_base(self, i: int) -> Region:
        return digit_region(word_at(i))

    def region_word(self, region: Iterable[GeneratorId]) -> str:
        """The word fixed by a consistent digit meet over positions 0..n-1"""
        bits = {g.index: g.bit for g in region}
        return "".join(str(bits[i]) for i in range(len(bits)))


class CantorPrefix(Presentation):
    kind = SpaceKind.CANTOR_PREFIX
    description = "Cantor space, generators l_p for finite prefixes p"
    point_type = "BinaryStream"

    def generator(self, n: int) -> PrefixGenerator:
        return PrefixGenerator(word_at(n))

    def generator_index(self, g: GeneratorId) -> int:
        self.check_generator(g)
        return word_index(g.word)

    def leq(self, g: GeneratorId, h: GeneratorId) -> bool:
        return (isinstance(g, PrefixGenerator) and isinstance(h, PrefixGenerator)
                and g.word.startswith(h.word))

    def up_closure(self, F: Iterable[GeneratorId]) -> Optional[FrozenSet[GeneratorId]]:
        return frozenset(PrefixGenerator(g.word[:i]) for g in F for i in range(len(g.word) + 1))

    def relations(self, bound: int) -> List[Relation]:
        ws = [w for n in range(bound + 1) for w in words(n)]
        rels = [Relation(FormalMachine.atom(PrefixGenerator("")), FormalMachine.top())]
        for i, p in enumerate(ws):
            for q in ws[i + 1:]:
                lp, lq = PrefixGenerator(p), PrefixGenerator(q)
                if q.startswith(p):
                    rels.append(Relation(FormalMachine.of([lp, lq]), FormalMachine.atom(lq)))
                elif not p.startswith(q):
                    rels.append(Relation(FormalMachine.of([lp, lq]), FormalMachine.bottom()))
            if len(p) < bound:
                rels.append(Relation(FormalMachine.of([PrefixGenerator(p + "0")], [PrefixGenerator(p + "1")]),
                                     FormalMachine.atom(PrefixGenerator(p))))
        return rels

    @staticmethod
    def meet_word(b: FormalMeet) -> Optional[str]:
        """
        Longest word of a positive prefix meet (the meet equals l_word), or
        None when two of its words are incomparable (the meet is 0).
        The empty meet is l_e.
        """
        longest = ""
        for g in sorted(b.generators, key=lambda g: len(g.word)):
            if not g.word.startswith(longest):
                return None
            longest = g.word
        return longest

    def covers(self, m: FormalMachine) -> bool:
        """
        Reduce each positive branch to l_p for its longest word p, then pad
        all words to the maximal length N: m is a cover iff every word of
        length N extends one of them. Counted over the minimal words, that is
        sum 2^(N - |p|) == 2^N.
        """
        self.check_machine(m)
        found = set()
        for b in m.branches:
            w = self.meet_word(b)
            if w is not None:
                found.add(w)
        if not found:
            return False
        n = max(len(w) for w in found)
        minimal = [w for w in found if not any(w[:i] in found for i in range(len(w)))]
        return sum(1 << (n - len(w)) for w in minimal) == 1 << n

    def positive(self, b: FormalMeet) -> bool:
        self.check_meet(b)
        return self.meet_word(b) is not None

    def embed(self, x) -> GeneralizedPoint:
        stream = _require_stream(x)
        never = SemiDecider.never()

        def query(g: GeneratorId) -> SemiDecider:
            self.check_generator(g)
            # reading the word takes one query per digit
            if stream.prefix(len(g.word)) == g.word:
                return SemiDecider.halting_at(max(1, len(g.word)))
            return never

        return GeneralizedPoint(query, label=f"i({stream.label})")

    def contains(self, x, g: GeneratorId) -> bool:
        self.check_generator(g)
        return _require_stream(x).prefix(len(g.word)) == g.word

    def sample_points(self, depth: int) -> List[BinaryStream]:
        return [BinaryStream.from_word(w) for w in words(depth)]

    def uniform_cover(self, depth: int) -> List[Region]:
        return [frozenset([PrefixGenerator(w)]) for w in words(depth)]

    def uniform_cover_size(self, depth: int) -> int:
        return 1 << depth

    def positive_base(self, i: int) -> Region:
        return frozenset([PrefixGenerator(word_at(i))])

    def region_word(self, region: Iterable[GeneratorId]) -> Optional[str]:
        return self.meet_word(FormalMeet(frozenset(region)))


def _minimal_sets(sets: Iterable[FrozenSet]) -> set:
    """Drop every set that strictly contains another"""
    kept: List[FrozenSet] = []
    for s in sorted(set(sets), key=len):
        if not any(k <= s for k in kept):
            kept.append(s)
    return set(kept)
