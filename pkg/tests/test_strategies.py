from fractions import Fraction

import pytest

from gtprob.extreal import INF, ONE, ZERO, ext, scale
from gtprob.functionals import Measure, OutcomeSet
from gtprob.gametree import (
    EMPTY,
    GameSpec,
    Supermartingale,
    in_cut_interval,
    cut_le,
    verify_supermartingale,
)
from gtprob.expectation import EventWindow, Payoff, indicator
from gtprob.strategies import (
    doob_upcrossing,
    enumerate_intervals,
    enumerate_rationals,
    levy_capital_trace,
    levy_strategy,
    mixture,
)

BIN = OutcomeSet(["0", "1"])


def coin_game(horizon):
    return GameSpec(BIN, Measure.uniform(BIN), horizon)


def step_multiplier_base(game, up=Fraction(3, 2), down=Fraction(1, 2)):
    """Multiplicative coin martingale: factor `up` on 1, `down` on 0."""

    def fn(s):
        v = Fraction(1)
        for x in s:
            v *= up if x == "1" else down
        return ext(v)

    return Supermartingale.from_fn(game, fn)


# -- interval enumeration -----------------------------------------------


def test_rational_enumeration_prefix():
    gen = enumerate_rationals()
    first = [next(gen) for _ in range(8)]
    assert first == [
        Fraction(0),
        Fraction(1),
        Fraction(1, 2),
        Fraction(2),
        Fraction(1, 3),
        Fraction(3),
        Fraction(1, 4),
        Fraction(2, 3),
    ]


def test_interval_enumeration_is_deterministic_and_injective():
    six = enumerate_intervals(6)
    assert six == [
        (Fraction(0), Fraction(1)),
        (Fraction(0), Fraction(1, 2)),
        (Fraction(0), Fraction(2)),
        (Fraction(1, 2), Fraction(1)),
        (Fraction(0), Fraction(1, 3)),
        (Fraction(1), Fraction(2)),
    ]
    fifty = enumerate_intervals(50)
    assert len(set(fifty)) == 50
    assert all(0 <= a < b for a, b in fifty)
    assert fifty[:6] == six


# -- additive upcross engine ----------------------------------------------


def test_doob_on_constant_base_is_constant_one():
    game = coin_game(3)
    base = Supermartingale.constant(game, 1)
    for a, b in [(Fraction(1, 2), Fraction(3, 4)), (Fraction(1, 2), Fraction(2))]:
        res = doob_upcrossing(game, base, a, b)
        assert all(v == ONE for v in res.table.table.values())
        assert verify_supermartingale(game, res.table).ok


def test_doob_hand_simulation_on_step_multiplier_base():
    # Hand-run of the additive rule on base 1, 3/2, 3/4, 9/8, 27/16 with
    # band (4/5, 6/5): mirror, freeze at 3/2, resume at 3/4, mirror twice.
    game = coin_game(4)
    base = step_multiplier_base(game)
    res = doob_upcrossing(game, base, Fraction(4, 5), Fraction(6, 5))
    path = ("1", "0", "1", "1")
    got = [res.table.value(path[:n]) for n in range(5)]
    assert got == [ONE, ext("3/2"), ext("3/2"), ext("15/8"), ext("39/16")]
    # Second upcross completes at the path end; floor is b + (b - a).
    assert path in res.trace.sigma[2]
    assert res.table.value(path) >= ext("8/5")
    assert verify_supermartingale(game, res.table).ok


def test_doob_off_origin_subtree_is_infinite():
    game = coin_game(3)
    base = step_multiplier_base(game)
    normalized = base.scaled(Fraction(2, 3))  # value 1 at ("1",)
    res = doob_upcrossing(
        game, normalized, Fraction(4, 5), Fraction(6, 5), origin=("1",), check_base=False
    )
    assert res.table.value(("0",)) == INF
    assert res.table.value(EMPTY) == INF
    assert res.table.value(("1",)) == ONE
    assert verify_supermartingale(game, res.table).ok


def test_doob_requires_valid_band_and_base():
    game = coin_game(2)
    base = step_multiplier_base(game)
    with pytest.raises(ValueError):
        doob_upcrossing(game, base, Fraction(2), Fraction(1))
    with pytest.raises(ValueError):
        doob_upcrossing(game, Supermartingale.constant(game, 2), Fraction(0), Fraction(1))


def test_doob_phase_floors_hold_at_every_node():
    # Frozen floor b + (k-1)(b-a) on [sigma_k, tau_k]; moving floor k(b-a)
    # on [tau_k, sigma_(k+1)].  Membership recomputed from the emitted cuts,
    # independently of the construction's internal state.
    game = coin_game(8)
    base = step_multiplier_base(game)
    a, b = Fraction(4, 5), Fraction(6, 5)
    res = doob_upcrossing(game, base, a, b)
    cycles = len(res.trace.sigma) - 1
    assert cycles >= 2
    crossings = 0
    for u in game.all_situations():
        v = res.table.value(u)
        assert v >= ZERO
        for k in range(1, cycles + 1):
            sigma_k = res.trace.sigma[k]
            tau_k = res.trace.tau[k]
            if len(sigma_k) and in_cut_interval(u, sigma_k, tau_k):
                assert v >= ext(b + (k - 1) * (b - a))
                crossings += 1
            if len(res.trace.tau[k]) and k + 1 <= cycles:
                if in_cut_interval(u, res.trace.tau[k], res.trace.sigma[k + 1]):
                    assert v >= ext(Fraction(k) * (b - a))
    assert crossings > 0
    for k in range(1, cycles):
        if len(res.trace.sigma[k]) and len(res.trace.tau[k]):
            assert cut_le(res.trace.sigma[k], res.trace.tau[k])


def test_doob_tail_oscillation_control():
    # Once the base stops oscillating by more than c/4 along a path, the
    # engine's later values can drop below the reference point by less
    # than c/2.  Use a base with geometrically shrinking step factors so
    # every path settles well inside the horizon.
    depth = 8
    game = coin_game(depth)
    eps = [Fraction(1, 4**n) for n in range(1, depth + 1)]

    def fn(s):
        v = Fraction(1)
        for n, x in enumerate(s):
            v *= (1 + eps[n]) if x == "1" else (1 - eps[n])
        return ext(v)

    base = Supermartingale.from_fn(game, fn)
    assert verify_supermartingale(game, base).ok
    c = Fraction(1, 2)
    res = doob_upcrossing(game, base, Fraction(4, 5), Fraction(9, 8))
    rng_paths = [
        tuple("1" if (i >> n) & 1 else "0" for n in range(depth)) for i in range(0, 256, 7)
    ]
    for path in rng_paths:
        vals = [base.value(path[:n]).finite for n in range(depth + 1)]
        settle = next(
            n
            for n in range(depth + 1)
            if max(vals[n:]) - min(vals[n:]) < c / 4
        )
        ref = res.table.value(path[:settle])
        for n in range(settle, depth + 1):
            assert res.table.value(path[:n]) - ref > ext(-c / 2)


def test_doob_verifies_on_first_enumerated_intervals():
    game = coin_game(6)
    base = step_multiplier_base(game)
    for a, b in enumerate_intervals(6):
        res = doob_upcrossing(game, base, a, b)
        assert verify_supermartingale(game, res.table).ok
        assert res.table.min_value() >= ZERO


# -- multiplicative engine ---------------------------------------------------


def test_levy_never_activates_when_conditional_stays_high():
    game = coin_game(3)
    xi = indicator(EventWindow.coordinate_is(3, "1"))
    # Conditional is 1/2 everywhere before resolution; with a below it the
    # strategy never enters.
    res = levy_strategy(game, xi, Fraction(1, 3), Fraction(9, 10))
    assert all(v == ONE for v in res.table.table.values())


def test_levy_frozen_example_capital_two():
    # Conditional of the event {third outcome is 1} sits at 1/2 < 3/5, so
    # the ride starts at the root; on paths in the event the witness hits 1
    # at depth 3 and the capital is 1/(1/2) = 2 >= (b/a) = 3/2.
    game = coin_game(3)
    xi = indicator(EventWindow.coordinate_is(3, "1"))
    a, b = Fraction(3, 5), Fraction(9, 10)
    res = levy_strategy(game, xi, a, b)
    assert res.shift == 0
    assert EMPTY in res.trace.tau[1]
    for path in BIN.tuples(3):
        if path[2] == "1":
            assert path in res.trace.sigma[1]
            assert res.table.value(path) == ext(2)
            assert res.table.value(path) >= ext(Fraction(b, a))
        else:
            assert res.table.value(path) == ZERO
    assert verify_supermartingale(game, res.table).ok
    assert res.table.min_value() >= ZERO


def test_levy_table_matches_path_trace():
    game = coin_game(4)
    xi = indicator(EventWindow(2, 4, predicate=lambda w: w.count("1") >= 2))
    a, b = Fraction(3, 5), Fraction(9, 10)
    for slack in ("none", "dyadic"):
        res = levy_strategy(game, xi, a, b, slack=slack)
        assert verify_supermartingale(game, res.table).ok
        for path in BIN.tuples(4):
            steps = levy_capital_trace(game, path, a, b, slack=slack, xi=xi)
            for st in steps:
                assert st.capital == res.table.value(st.situation)


def test_levy_shifts_payoffs_with_negative_values():
    game = coin_game(2)
    xi = Payoff.from_table(
        {l: v for l, v in zip(BIN.tuples(2), [-2, 0, 1, 3])}, 2
    )
    res = levy_strategy(game, xi, Fraction(1, 2), Fraction(4, 5))
    # Least leaf is -2, so the internal shift is -3 and the ridden
    # conditionals are those of xi + 3.
    assert res.shift == -3
    assert verify_supermartingale(game, res.table).ok


def test_levy_rejects_unbounded_below_payoffs():
    from gtprob.extreal import NEG_INF

    game = coin_game(1)
    xi = Payoff.from_table({("0",): NEG_INF, ("1",): 0}, 1)
    with pytest.raises(ValueError):
        levy_strategy(game, xi, Fraction(1, 2), Fraction(3, 4))


def test_levy_growth_floor_across_cycles():
    # Two-cycle fixture within the dense cap: conditionals oscillate
    # 1/2, 19/20, 1/2, 19/20 along the all-ones path.
    from gtprob.laws import scripted_conditional_game

    targets = [Fraction(1, 2), Fraction(19, 20), Fraction(1, 2), Fraction(19, 20)]
    scripted = scripted_conditional_game(targets)
    game, event, path = scripted.game, scripted.event, scripted.path
    a, b = Fraction(3, 5), Fraction(9, 10)
    res = levy_strategy(game, indicator(event), a, b)
    # Check the exit-cut capitals: at the k-th exit along the distinguished
    # path the capital is at least (b/a)^k.
    for k in (1, 2):
        exit_node = res.trace.sigma[k].member_above(path)
        assert exit_node is not None
        assert res.table.value(exit_node) >= ext(Fraction(b, a) ** k)
    assert verify_supermartingale(game, res.table).ok


# -- mixtures ------------------------------------------------------------------


def test_single_part_mixture_halves_and_reports_tail():
    game = coin_game(4)
    base = step_multiplier_base(game)
    part = doob_upcrossing(game, base, Fraction(4, 5), Fraction(6, 5))
    mix = mixture([part])
    assert mix.table.value(EMPTY) == ext("1/2")
    assert mix.truncation_bound == ext("1/2")
    assert "truncated" in mix.note


def test_two_constant_parts_mix_to_three_quarters():
    game = coin_game(2)
    ones = Supermartingale.constant(game, 1)
    mix = mixture([ones, ones])
    assert all(v == ext("3/4") for v in mix.table.table.values())


def test_mixture_of_enumerated_upcross_parts_verifies():
    game = coin_game(6)
    base = step_multiplier_base(game)
    parts = [
        doob_upcrossing(game, base, a, b, check_base=False)
        for a, b in enumerate_intervals(4)
    ]
    mix = mixture(parts)
    assert verify_supermartingale(game, mix.table).ok
    # Pointwise agreement with the direct weighted sum.
    for s in game.all_situations():
        acc = ZERO
        for i, p in enumerate(parts, start=1):
            acc = acc + scale(Fraction(1, 2**i), p.table.value(s))
        assert mix.table.value(s) == acc


def test_mixture_rejects_mismatched_parts():
    g1, g2 = coin_game(3), coin_game(4)
    p1 = doob_upcrossing(g1, step_multiplier_base(g1), Fraction(1, 2), Fraction(1))
    p2 = doob_upcrossing(g2, step_multiplier_base(g2), Fraction(1, 2), Fraction(1))
    with pytest.raises(ValueError):
        mixture([p1, p2])
