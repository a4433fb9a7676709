"""
Tests for machine processes, the dovetail scheduler and evaluation.
"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modules import machine_runtime as rt
from modules.generators import u, z
from modules.machine_parser import parse_machine
from modules.machine_runtime import (END, IDLE, EnumeratedProcess, compile_machine, evaluate,
                                     evaluate_fuel_bound, race)
from modules.machines import FormalMachine, FormalMeet, box_contains
from modules.points import BinaryStream, generalized_point
from modules.semidecider import ForecastKind, GeneralizedPoint, Halted, SemiDecider, Suspended
from modules.space_interface import SpaceKind
from modules.space_registry import point_embed
from tests.strategies import digit_generators, machines, random_machine


def hidden_point(F):
    """p_F whose queries must be run to learn anything"""
    members = frozenset(F)
    return GeneralizedPoint(lambda g: (SemiDecider.halting_at(1) if g in members
                                       else SemiDecider.never()).hide_forecast(), label="hidden")


def forecast_point(F):
    """p_F without a declared support, so evaluation goes through the forecast cache"""
    members = frozenset(F)
    return GeneralizedPoint(lambda g: SemiDecider.halting_at(1) if g in members else SemiDecider.never(),
                            label="forecast")


def random_support(rng, m, extra=2):
    pool = sorted(m.generators, key=lambda g: g.sort_key)
    chosen = {g for g in pool if rng.random() < 0.6}
    for _ in range(rng.randint(0, extra)):
        chosen.add((z if rng.randrange(2) else u)(rng.randrange(4)))
    return frozenset(chosen)


class TestCompile:
    """compile_machine enumerates normal-form branches"""

    def test_two_branches_then_end(self):
        mp = compile_machine(parse_machine("z0 | u0"))
        assert mp.branch_at(0) == FormalMeet.of(z(0))
        assert mp.branch_at(1) == FormalMeet.of(u(0))
        assert mp.branch_at(2) is END
        assert mp.next_candidate(2) is None

    def test_bottom_is_empty(self):
        mp = compile_machine(FormalMachine.bottom())
        assert mp.branch_at(0) is END
        assert mp.is_finite

    def test_absorption(self):
        mp = compile_machine(parse_machine("z0 | z0 & u1"))
        assert mp.branches == (FormalMeet.of(z(0)),)

    def test_reordered_requires_permutation(self):
        mp = compile_machine(parse_machine("z0 | u1 | z2"))
        assert mp.reordered([2, 0, 1]).branches[0] == mp.branches[2]
        with pytest.raises(ValueError):
            mp.reordered([0, 0, 1])


class TestEvaluate:
    """Dovetailed evaluation and the box test"""

    def test_cost_of_second_branch(self):
        mp = compile_machine(parse_machine("z0 | u1"))
        assert evaluate(mp, generalized_point({u(1)})).run(10) == Halted(5)
        assert evaluate(mp, generalized_point({z(0)})).run(10) == Halted(2)

    def test_embedded_stream(self):
        mp = compile_machine(parse_machine("z0 | u0"))
        x = point_embed(SpaceKind.CANTOR_DIGITS, BinaryStream.from_word("00"))
        assert isinstance(evaluate(mp, x).run(100), Halted)

    def test_disjoint_meet_never_halts(self):
        mp = compile_machine(parse_machine("z0 & u0"))
        for word in ("0", "1"):
            x = point_embed(SpaceKind.CANTOR_DIGITS, BinaryStream.from_word(word))
            assert evaluate(mp, x).run(10 ** 6) == Suspended(10 ** 6)

    def test_bottom_never_halts(self):
        d = evaluate(compile_machine(FormalMachine.bottom()), generalized_point({z(0)}))
        assert d.run(10 ** 6) == Suspended(10 ** 6)
        assert d.forecast.kind is ForecastKind.DIVERGES

    @pytest.mark.parametrize("F, halts", [
        ({z(0), z(1)}, True),
        ({u(2)}, True),
        ({z(0)}, False),
        ({z(0), u(1), z(3)}, False),
    ])
    def test_box(self, F, halts):
        mp = compile_machine(parse_machine("(z0 & z1) | u2"))
        outcome = rt.test_box(mp, generalized_point(F)).run(10 ** 4)
        assert isinstance(outcome, Halted) is halts

    def test_box_steps(self):
        mp = compile_machine(parse_machine("(z0 & z1) | u2"))
        assert rt.test_box(mp, generalized_point({u(2)})).run(100) == Halted(2)
        assert rt.test_box(mp, generalized_point({z(0), z(1)})).run(100) == Halted(6)

    def test_enumerated_process(self):
        mp = EnumeratedProcess(lambda i: FormalMeet.of(z(0)) if i == 10 else IDLE, label="late z0")
        d = evaluate(mp, generalized_point({z(0)}))
        assert d.run(11) == Suspended(11)
        assert d.run(12) == Halted(12)
        assert d.forecast.kind is ForecastKind.HALTS

    def test_finite_enumerated_process_diverges(self):
        mp = EnumeratedProcess(lambda i: IDLE, length=3)
        assert evaluate(mp, generalized_point({z(0)})).forecast.kind is ForecastKind.DIVERGES

    def test_infinite_idle_process(self):
        d = evaluate(EnumeratedProcess(lambda i: IDLE), generalized_point(set()))
        assert d.run(5000) == Suspended(5000)
        assert d.forecast.kind is ForecastKind.UNKNOWN


class TestEvaluationPaths:
    """Closed-form, forecast and stepped evaluation agree"""

    def test_three_paths_agree(self, rng):
        for _ in range(500):
            m = random_machine(rng, SpaceKind.CANTOR_DIGITS, depth=4, max_branches=5, max_branch_size=3)
            F = random_support(rng, m)
            mp = compile_machine(m)
            bound = evaluate_fuel_bound(m)
            closed = evaluate(mp, generalized_point(F)).run(bound)
            forecast = evaluate(mp, forecast_point(F)).run(bound)
            stepped = evaluate(mp, hidden_point(F)).run(bound)
            assert closed == forecast == stepped, (m, F)
            assert isinstance(closed, Halted) == box_contains(m, F), (m, F)

    def test_workers_do_not_change_answers(self, rng):
        for _ in range(100):
            m = random_machine(rng, SpaceKind.CANTOR_DIGITS, depth=4, max_branches=5, max_branch_size=3)
            F = random_support(rng, m)
            mp = compile_machine(m)
            bound = evaluate_fuel_bound(m)
            one = evaluate(mp, hidden_point(F)).run(bound)
            four = evaluate(mp, hidden_point(F), workers=4).run(bound)
            assert one == four

    def test_mixed_halting_steps(self):
        steps = {z(0): 3, z(1): 1, u(2): 6}
        x = GeneralizedPoint(lambda g: SemiDecider.halting_at(steps[g]) if g in steps else SemiDecider.never())
        hidden = GeneralizedPoint(lambda g: x.query(g).hide_forecast())
        mp = compile_machine(parse_machine("(z0 & z1) | u2 | u3"))
        assert evaluate(mp, x).run(10 ** 4) == evaluate(mp, hidden).run(10 ** 4)


def draw_support(data, m):
    """Some of m's generators plus a few others, as a point support"""
    pool = sorted(m.generators, key=lambda g: g.sort_key)
    own = data.draw(st.frozensets(st.sampled_from(pool))) if pool else frozenset()
    return own | data.draw(st.frozensets(digit_generators(), max_size=2))


class TestRuntimeProperties:
    """Fuel monotonicity and schedule independence"""

    @given(machines(digit_generators(), max_branch_size=2), st.data())
    @settings(max_examples=500)
    def test_fuel_monotonicity(self, m, data):
        F = draw_support(data, m)
        mp = compile_machine(m)
        bound = evaluate_fuel_bound(m)
        final = evaluate(mp, hidden_point(F)).run(bound)
        fuels = data.draw(st.lists(st.integers(0, bound + 5), min_size=1, max_size=6))
        for fuel in sorted(fuels):
            outcome = evaluate(mp, hidden_point(F)).run(fuel)
            if isinstance(final, Halted) and fuel >= final.at_step:
                assert outcome == final
            else:
                assert outcome == Suspended(fuel)

    def test_one_decider_is_monotone_across_calls(self, rng):
        for _ in range(100):
            m = random_machine(rng, SpaceKind.CANTOR_DIGITS, depth=3)
            F = random_support(rng, m)
            d = evaluate(compile_machine(m), hidden_point(F))
            seen = None
            for fuel in sorted(rng.sample(range(0, 200), 10)):
                outcome = d.run(fuel)
                if seen is not None:
                    assert outcome == seen
                elif isinstance(outcome, Halted):
                    seen = outcome

    @given(machines(digit_generators(), max_branches=5), st.data())
    @settings(max_examples=500)
    def test_schedule_independence(self, m, data):
        F = draw_support(data, m)
        mp = compile_machine(m)
        order = data.draw(st.permutations(list(range(len(mp.branches)))))
        shuffled = mp.reordered(order)
        bound = evaluate_fuel_bound(m)
        expected = box_contains(m, F)
        assert isinstance(evaluate(shuffled, generalized_point(F)).run(bound), Halted) == expected
        assert isinstance(evaluate(shuffled, hidden_point(F)).run(bound), Halted) == expected

    def test_agrees_with_denotation_on_sample_points(self, rng, digits):
        for _ in range(200):
            m = random_machine(rng, SpaceKind.CANTOR_DIGITS, depth=3)
            mp = compile_machine(m)
            bound = evaluate_fuel_bound(m)
            for x in digits.sample_points(3):
                assert isinstance(evaluate(mp, digits.embed(x)).run(bound), Halted) == digits.accepts(x, m)


class TestRace:
    """First-to-halt combinator"""

    def test_winner_and_cost(self):
        r = race(SemiDecider.halting_at(5), SemiDecider.halting_at(2))
        assert r.run(100) == Halted(8)
        assert r.winner == 1

    def test_hidden_competitors(self):
        r = race(SemiDecider.halting_at(5).hide_forecast(), SemiDecider.halting_at(2).hide_forecast(),
                 workers=2)
        assert r.run(100) == Halted(8)
        assert r.winner == 1

    def test_all_diverge(self):
        r = race(SemiDecider.never(), SemiDecider.never())
        assert r.forecast.kind is ForecastKind.DIVERGES
        assert r.winner is None

    def test_first_competitor_wins_ties(self):
        r = race(SemiDecider.halting_at(2), SemiDecider.halting_at(1))
        assert r.run(100) == Halted(5)
        assert r.winner == 0
