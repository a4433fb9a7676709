"""
Tests for the machine expression parser and printer.
"""
from fractions import Fraction

import pytest
from hypothesis import given

from modules.error_handler import (IncompatiblePresentationError, InvalidGeneratorError,
                                   MachineSyntaxError)
from modules.generators import ell, interval, u, z
from modules.machine_parser import get_machine_parser, parse_machine, print_machine
from modules.machines import FormalMachine, FormalMeet, normalize
from tests.strategies import digit_generators, interval_generators, machines, prefix_generators


class TestParse:
    """Expressions to join-of-meets"""

    def test_meet_inside_join(self):
        m = parse_machine("(z0 & u1) | u2")
        assert m.branches == {FormalMeet.of(z(0), u(1)), FormalMeet.of(u(2))}

    def test_interval_branches(self):
        m = parse_machine("i(1/3,2/3) | i(0,1/2)")
        assert m.branches == {FormalMeet.of(interval(Fraction(1, 3), Fraction(2, 3))),
                              FormalMeet.of(interval(0, Fraction(1, 2)))}

    def test_prefix_words(self):
        m = parse_machine('l"" | l"01" & l"0"')
        assert m.branches == {FormalMeet.of(ell("")), FormalMeet.of(ell("01"), ell("0"))}

    def test_meet_distributes(self):
        m = parse_machine("(z0 | u0) & (z1 | u1)")
        assert len(m) == 4
        assert FormalMeet.of(u(0), z(1)) in m.branches

    def test_no_absorption(self):
        m = parse_machine("z0 | z0 & u1")
        assert len(m) == 2
        assert len(normalize(m)) == 1

    def test_constants(self):
        assert parse_machine("T") == FormalMachine.top()
        assert parse_machine("F") == FormalMachine.bottom()
        assert parse_machine("F | z0") == FormalMachine.atom(z(0))
        assert parse_machine("T & u3") == FormalMachine.atom(u(3))
        assert parse_machine("F & u3") == FormalMachine.bottom()

    def test_whitespace_is_ignored(self):
        assert parse_machine(" z0|\n\tu1 ") == parse_machine("z0 | u1")

    def test_parser_is_shared(self):
        assert get_machine_parser() is get_machine_parser()


class TestErrors:
    """Syntax and generator errors"""

    def test_trailing_operator(self):
        with pytest.raises(MachineSyntaxError, match="unexpected end of expression") as info:
            parse_machine("z0 &")
        assert info.value.line == 1
        assert info.value.exit_code == 3

    def test_unexpected_character(self):
        with pytest.raises(MachineSyntaxError) as info:
            parse_machine("z0 $ u1")
        assert (info.value.line, info.value.column) == (1, 4)

    def test_unexpected_token(self):
        with pytest.raises(MachineSyntaxError, match="'[|]'") as info:
            parse_machine("z0 | | u1")
        assert info.value.column == 6

    def test_position_on_later_line(self):
        with pytest.raises(MachineSyntaxError) as info:
            parse_machine("z0 |\nu1 & )")
        assert (info.value.line, info.value.column) == (2, 6)

    def test_unclosed_parenthesis(self):
        with pytest.raises(MachineSyntaxError):
            parse_machine("(z0 | u1")

    def test_zero_denominator(self):
        with pytest.raises(InvalidGeneratorError, match="zero denominator"):
            parse_machine("i(0,1/0)")

    @pytest.mark.parametrize("text", ["i(2/3,1/3)", "i(1/2,1/2)", "i(-1/2,1)", "i(0,2)"])
    def test_invalid_interval(self, text):
        with pytest.raises(InvalidGeneratorError):
            parse_machine(text)

    def test_mixed_spaces(self):
        with pytest.raises(IncompatiblePresentationError):
            parse_machine('z0 | l"0"')


class TestRoundTrip:
    """print_machine then parse_machine is the identity"""

    def test_examples(self):
        for text in ["F", "T", "z0", "z0 | u1 & z2", 'l"" | l"0" & l"01"', "i(0,1/2) | i(1/3,1)"]:
            m = parse_machine(text)
            assert parse_machine(print_machine(m)) == m

    def test_canonical_text(self):
        assert print_machine(parse_machine("u2 | u1 & z0")) == "u2 | z0 & u1"
        assert print_machine(parse_machine("i(1/2,1) | i(0,1/2)")) == "i(0,1/2) | i(1/2,1)"

    @given(machines(digit_generators()))
    def test_digits(self, m):
        nm = normalize(m)
        assert parse_machine(print_machine(nm)) == nm
        assert parse_machine(print_machine(m)) == m

    @given(machines(prefix_generators()))
    def test_prefix(self, m):
        nm = normalize(m)
        assert parse_machine(print_machine(nm)) == nm

    @given(machines(interval_generators()))
    def test_interval(self, m):
        nm = normalize(m)
        assert parse_machine(print_machine(nm)) == nm
