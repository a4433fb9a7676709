"""
Tests for generators and formal machines.
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modules.error_handler import IncompatiblePresentationError, InvalidGeneratorError
from modules.generators import (DigitGenerator, IntervalGenerator, OpaqueGenerator, Polarity,
                                PrefixGenerator, ell, interval, u, z)
from modules.machines import (FormalMachine, FormalMeet, Relation, box_contains, distribute, join,
                              join_all, meet, meet_all, normalize)
from tests.strategies import digit_generators, machines


class TestGenerators:
    """Generator payloads, text forms and ordering"""

    def test_text_forms(self):
        assert z(0).to_text() == "z0"
        assert u(12).to_text() == "u12"
        assert ell("01").to_text() == 'l"01"'
        assert ell("").to_text() == 'l""'
        assert interval("1/3", "2/3").to_text() == "i(1/3,2/3)"
        assert interval(0, 1).to_text() == "i(0,1)"

    def test_space_tags(self):
        assert z(0).space_tag == "cantor-digits"
        assert ell("1").space_tag == "cantor-prefix"
        assert interval(0, 1).space_tag == "interval"
        assert OpaqueGenerator("sierpinski", 0).space_tag == "sierpinski"

    def test_invalid_payloads(self):
        with pytest.raises(InvalidGeneratorError):
            DigitGenerator(-1, Polarity.ZERO)
        with pytest.raises(InvalidGeneratorError):
            PrefixGenerator("012")
        with pytest.raises(InvalidGeneratorError):
            interval(Fraction(2, 3), Fraction(1, 3))
        with pytest.raises(InvalidGeneratorError):
            interval(0.25, 1)
        with pytest.raises(InvalidGeneratorError):
            interval(0, 2)
        with pytest.raises(InvalidGeneratorError):
            OpaqueGenerator("", 0)
        with pytest.raises(InvalidGeneratorError):
            OpaqueGenerator("sierpinski", True)
        with pytest.raises(InvalidGeneratorError):
            DigitGenerator(False, Polarity.ZERO)

    def test_invalid_generator_is_value_error(self):
        with pytest.raises(ValueError):
            interval(1, 1)

    def test_opposite_and_bit(self):
        assert z(3).opposite() == u(3)
        assert u(3).opposite() == z(3)
        assert z(0).bit == 0 and u(0).bit == 1

    def test_interval_trace_convention(self):
        left = interval(0, Fraction(1, 2))
        right = interval(Fraction(1, 2), 1)
        assert left.contains(Fraction(0))
        assert not left.contains(Fraction(1, 2))
        assert right.contains(Fraction(1))
        assert not right.contains(Fraction(1, 2))
        assert not interval(Fraction(1, 4), Fraction(3, 4)).contains(Fraction(1, 4))

    def test_canonical_order(self):
        gens = [ell("0"), u(1), interval(0, 1), z(1), z(0), ell("")]
        ordered = sorted(gens)
        assert ordered == [z(0), z(1), u(1), ell(""), ell("0"), interval(0, 1)]

    def test_generators_hash_by_value(self):
        assert len({z(0), DigitGenerator(0, Polarity.ZERO), interval("1/2", 1), interval(Fraction(1, 2), 1)}) == 2


class TestFormalMachine:
    """Construction, text and space tags"""

    def test_top_and_bottom(self):
        assert FormalMachine.top().to_text() == "T"
        assert FormalMachine.bottom().to_text() == "F"
        assert FormalMachine.bottom().is_bottom
        assert FormalMeet().is_top

    def test_branches_are_sets(self):
        m = FormalMachine.of([z(0), u(1)], [u(2)], [u(1), z(0)])
        assert len(m.branches) == 2
        assert m.to_text() == "u2 | z0 & u1"

    def test_mixed_spaces_rejected(self):
        with pytest.raises(IncompatiblePresentationError):
            FormalMachine.of([z(0)], [ell("0")])
        with pytest.raises(IncompatiblePresentationError):
            FormalMeet.of(z(0), interval(0, 1))

    def test_space_tag_of_top_is_none(self):
        assert FormalMachine.top().space_tag is None
        assert FormalMachine.atom(z(0)).space_tag == "cantor-digits"

    def test_generators_and_branch_size(self):
        m = FormalMachine.of([z(0), u(1)], [u(2)])
        assert m.generators == frozenset({z(0), u(1), u(2)})
        assert m.max_branch_size == 2

    def test_relation_requires_one_space(self):
        with pytest.raises(IncompatiblePresentationError):
            Relation(FormalMachine.atom(z(0)), FormalMachine.atom(ell("")))


class TestAlgebra:
    """normalize, distribute, meet, join and box_contains"""

    def test_normalize_drops_supersets(self):
        m = FormalMachine.of([z(0)], [z(0), u(1)])
        assert normalize(m) == FormalMachine.atom(z(0))

    def test_normalize_top_absorbs_everything(self):
        m = FormalMachine.of([], [z(0)], [u(1), z(2)])
        assert normalize(m) == FormalMachine.top()

    def test_distribute_without_absorption(self):
        a = FormalMachine.of([z(0)], [u(1)])
        b = FormalMachine.of([z(0)], [u(2)])
        out = distribute(a, b)
        assert out == FormalMachine.of([z(0)], [z(0), u(2)], [u(1), z(0)], [u(1), u(2)])
        assert meet(a, b) == FormalMachine.of([z(0)], [u(1), u(2)])

    def test_meet_with_bottom_and_top(self):
        a = FormalMachine.of([z(0)], [u(1)])
        assert meet(a, FormalMachine.bottom()).is_bottom
        assert meet(a, FormalMachine.top()) == a

    def test_join_all_and_meet_all(self):
        assert join_all([]) == FormalMachine.bottom()
        assert meet_all([]) == FormalMachine.top()
        atoms = [FormalMachine.atom(g) for g in (z(0), u(1))]
        assert join_all(atoms) == FormalMachine.of([z(0)], [u(1)])
        assert meet_all(atoms) == FormalMachine.of([z(0), u(1)])

    def test_box_contains(self):
        m = FormalMachine.of([z(0), u(1)], [u(2)])
        assert box_contains(m, {z(0), u(1), z(5)})
        assert box_contains(m, [u(2)])
        assert not box_contains(m, {z(0)})
        assert box_contains(FormalMachine.top(), set())
        assert not box_contains(FormalMachine.bottom(), {z(0)})

    @given(machines(digit_generators()))
    @settings(max_examples=200)
    def test_normalize_idempotent(self, m):
        assert normalize(normalize(m)) == normalize(m)

    @given(machines(digit_generators()), st.frozensets(digit_generators(), max_size=6))
    @settings(max_examples=300)
    def test_normalize_preserves_box_membership(self, m, F):
        assert box_contains(m, F) == box_contains(normalize(m), F)

    @given(machines(digit_generators()), machines(digit_generators()), machines(digit_generators()))
    @settings(max_examples=200)
    def test_lattice_laws(self, a, b, c):
        assert join(a, b) == join(b, a)
        assert meet(a, b) == meet(b, a)
        assert join(join(a, b), c) == join(a, join(b, c))
        assert meet(meet(a, b), c) == meet(a, meet(b, c))
        assert join(a, meet(a, b)) == normalize(a)
        assert meet(a, join(a, b)) == normalize(a)
        assert meet(a, join(b, c)) == join(meet(a, b), meet(a, c))

    @given(machines(digit_generators()), machines(digit_generators()),
           st.frozensets(digit_generators(), max_size=6))
    @settings(max_examples=300)
    def test_box_membership_is_a_homomorphism(self, a, b, F):
        assert box_contains(join(a, b), F) == (box_contains(a, F) or box_contains(b, F))
        assert box_contains(meet(a, b), F) == (box_contains(a, F) and box_contains(b, F))
