from fractions import Fraction

import pytest

from gtprob.extreal import INF, ONE, ZERO, ext
from gtprob.functionals import Gamble, Measure, OutcomeSet, SupContent
from gtprob.gametree import (
    EMPTY,
    BudgetViolation,
    Cut,
    GameSpec,
    Relation,
    Strategy,
    Supermartingale,
    capital_process,
    cut_le,
    format_situation,
    in_cut_interval,
    is_prefix,
    parse_situation,
    relation,
    shift_strategy,
    stop_when_covered,
    translate_strategy,
    verify_supermartingale,
)

BIN = OutcomeSet(["0", "1"])


def coin_game(horizon=3):
    return GameSpec(BIN, Measure.uniform(BIN), horizon)


def sup_game(horizon=3):
    return GameSpec(BIN, SupContent(BIN), horizon)


# -- situations and cuts ------------------------------------------------


def test_relation_classification():
    assert relation(("1", "0"), ("1", "0", "1")) == Relation.STRICT_PREFIX
    assert relation(("0", "1"), ("1", "0")) == Relation.INCOMPARABLE
    assert relation(("1",), ("1",)) == Relation.EQUAL
    assert relation(("1", "0", "1"), ("1", "0")) == Relation.STRICT_EXTENSION


def test_empty_situation_is_prefix_of_everything():
    for s in [EMPTY, ("0",), ("1", "0"), ("1", "1", "1")]:
        assert is_prefix(EMPTY, s)


def test_situation_string_round_trip():
    for s in [EMPTY, ("1",), ("1", "0", "1")]:
        assert parse_situation(format_situation(s, BIN), BIN) == s
    wide = OutcomeSet(["up", "down"])
    s = ("up", "down", "up")
    assert parse_situation(format_situation(s, wide), wide) == s
    with pytest.raises(ValueError):
        parse_situation("2", BIN)


def test_cut_rejects_comparable_members():
    with pytest.raises(ValueError):
        Cut([("1",), ("1", "0")])
    cut = Cut([("0",), ("1", "0"), ("1", "1")])
    assert cut.member_above(("1", "0", "1")) == ("1", "0")
    assert cut.member_above(EMPTY) is None


def test_cut_order_and_intervals():
    sigma = Cut([("0",), ("1",)])
    tau = Cut([("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")])
    assert cut_le(sigma, tau)
    assert not cut_le(tau, sigma)
    # [sigma, tau): entered sigma, not yet entered tau.
    assert in_cut_interval(("0",), sigma, tau, hi_closed=False)
    assert not in_cut_interval(("0", "0"), sigma, tau, hi_closed=False)
    # [sigma, tau]: the tau members still belong.
    assert in_cut_interval(("0", "0"), sigma, tau, hi_closed=True)
    assert not in_cut_interval(("0", "0", "1"), sigma, tau, hi_closed=True)
    assert not in_cut_interval(EMPTY, sigma, tau)


# -- capital processes ---------------------------------------------------


def test_doubling_strategy_single_win():
    # Hand simulation: stake all on "1" at double-or-nothing each round.
    game = coin_game()
    strat = Strategy.double_on(game, "1")
    assert capital_process(game, strat, ("1",)) == [ONE, ext(2)]
    assert capital_process(game, strat, ("1", "0")) == [ONE, ext(2), ZERO]


def test_do_nothing_keeps_capital():
    game = coin_game()
    strat = Strategy.do_nothing(game, initial=5)
    assert capital_process(game, strat, ("0", "1", "0")) == [ext(5)] * 4


def test_budget_violation_reports_situation_and_amounts():
    game = coin_game()
    greedy = Strategy(ONE, lambda s, k: Gamble.of(BIN, [2, 2]))
    with pytest.raises(BudgetViolation) as err:
        capital_process(game, greedy, ("1", "1"))
    assert err.value.situation == EMPTY
    assert err.value.price == ext(2)
    assert err.value.capital == ONE


def test_capital_process_rejects_long_paths():
    game = coin_game(horizon=2)
    with pytest.raises(ValueError):
        capital_process(game, Strategy.do_nothing(game), ("1", "1", "1"))


# -- verification --------------------------------------------------------


def doubling_table(game):
    def fn(s):
        if all(x == "1" for x in s):
            return ext(Fraction(2) ** len(s))
        return ZERO

    return Supermartingale.from_fn(game, fn)


def test_constant_table_is_a_martingale():
    game = coin_game()
    res = verify_supermartingale(game, Supermartingale.constant(game, 7))
    assert res.ok and res.martingale


def test_coin_step_table_verifies_exactly():
    game = coin_game(horizon=1)
    sm = Supermartingale({EMPTY: ONE, ("0",): ZERO, ("1",): ext(2)}, 1)
    res = verify_supermartingale(game, sm)
    assert res.ok and res.martingale


def test_violation_witness_at_root():
    game = coin_game(horizon=1)
    sm = Supermartingale({EMPTY: ONE, ("0",): ext(2), ("1",): ext(2)}, 1)
    res = verify_supermartingale(game, sm)
    assert not res.ok
    assert res.witness == (EMPTY, ext(2), ONE)
    assert res.witness_str(BIN) == "□: 2 > 1"


def test_doubling_table_is_a_coin_martingale():
    game = coin_game()
    res = verify_supermartingale(game, doubling_table(game))
    assert res.ok and res.martingale


def test_sup_game_needs_max_children_below_value():
    game = sup_game(horizon=1)
    sm = Supermartingale({EMPTY: ONE, ("0",): ZERO, ("1",): ext(2)}, 1)
    res = verify_supermartingale(game, sm)
    assert not res.ok and res.witness == (EMPTY, ext(2), ONE)


def test_verified_tables_dominate_min_of_descendant_leaves():
    # Coherence pushed through the tree: a verified table is at least the
    # minimum of its children at every node, hence at least the minimum
    # leaf below.
    game = coin_game()
    for sm in [doubling_table(game), Supermartingale.constant(game, 3)]:
        assert verify_supermartingale(game, sm).ok
        for s in game.all_situations(game.horizon - 1):
            children = [sm.value(s + (x,)) for x in BIN.labels]
            assert sm.value(s) >= min(children)
        for s in game.all_situations(game.horizon - 1):
            leaves = [
                sm.value(s + rest)
                for rest in BIN.tuples(game.horizon - len(s))
            ]
            assert sm.value(s) >= min(leaves)


def test_sum_of_verified_tables_verifies():
    game = coin_game()
    a = doubling_table(game)
    b = Supermartingale.constant(game, 1)
    assert verify_supermartingale(game, a + b).ok


def test_capital_process_matches_strategy_table():
    # The capital table built from a strategy reproduces play exactly.
    game = coin_game()
    strat = Strategy.double_on(game, "1")

    def table_fn(s):
        caps = capital_process(game, strat, s)
        return caps[-1]

    sm = Supermartingale.from_fn(game, table_fn)
    assert verify_supermartingale(game, sm).ok
    for path in BIN.tuples(3):
        caps = capital_process(game, strat, path)
        for n in range(4):
            assert caps[n] == sm.value(path[:n])


# -- transformations -----------------------------------------------------


def test_translate_identity_keeps_subtree_and_fills_inf():
    game = coin_game(horizon=2)
    sm = doubling_table(game)
    moved = translate_strategy(sm, ("0",), ("0",))
    for u in game.all_situations():
        if is_prefix(("0",), u):
            assert moved.value(u) == sm.value(u)
        else:
            assert moved.value(u) == INF


def test_translate_relocates_and_verifies():
    game = coin_game(horizon=3)
    sm = doubling_table(game)
    moved = translate_strategy(sm, ("0",), ("1",))
    assert verify_supermartingale(game, moved).ok
    for v in BIN.tuples(2):
        assert moved.value(("1",) + v) == sm.value(("0",) + v)
    assert moved.value(("0",)) == INF
    assert moved.value(EMPTY) == INF


def test_translate_needs_equal_depths():
    game = coin_game()
    with pytest.raises(ValueError):
        translate_strategy(doubling_table(game), ("0",), ("1", "1"))


def test_shift_at_root_is_identity():
    game = coin_game()
    sm = doubling_table(game)
    shifted = shift_strategy(game, sm, EMPTY)
    assert shifted.table == sm.table


def test_shift_replays_below_situation_and_verifies():
    game = coin_game(horizon=3)
    sm = doubling_table(game)
    shifted = shift_strategy(game, sm, ("0",))
    assert verify_supermartingale(game, shifted).ok
    assert shifted.value(("0", "1")) == sm.value(("1",)) == ext(2)
    assert shifted.value(("1",)) == INF


def test_shift_rejects_round_dependent_pricing():
    game = GameSpec(
        BIN,
        [Measure.uniform(BIN), Measure(BIN, {"0": "1/3", "1": "2/3"}), Measure.uniform(BIN)],
        3,
    )
    sm = Supermartingale.constant(game, 1)
    with pytest.raises(ValueError):
        shift_strategy(game, sm, ("0",))


def test_stop_when_covered_freezes_after_crossing():
    game = coin_game()
    sm = doubling_table(game)
    stopped = stop_when_covered(sm, ONE)
    # First crossing on the all-ones path happens at depth 1 (value 2).
    assert stopped.value(("1",)) == ext(2)
    assert stopped.value(("1", "1")) == ext(2)
    assert stopped.value(("1", "0")) == ext(2)
    assert stopped.value(("0",)) == ZERO
    assert verify_supermartingale(game, stopped).ok


def test_stop_when_covered_never_crossing_is_identity():
    game = coin_game()
    sm = Supermartingale.constant(game, 1)
    stopped = stop_when_covered(sm, ext(5))
    assert stopped.table == sm.table


def test_stop_when_covered_converts_touch_coverage_to_terminal_coverage():
    # Wherever the running maximum of the table tops the level along a
    # path, the stopped table still tops it at the final depth.
    game = coin_game()
    sm = doubling_table(game)
    level = ONE
    stopped = stop_when_covered(sm, level)
    assert verify_supermartingale(game, stopped).ok
    for leaf in BIN.tuples(game.horizon):
        running_max = max(sm.value(leaf[:n]) for n in range(game.horizon + 1))
        if running_max > level:
            assert stopped.value(leaf) > level


def test_stop_when_covered_constant_above_level_freezes_at_root():
    game = coin_game()
    sm = Supermartingale.constant(game, 2)
    stopped = stop_when_covered(sm, ONE)
    assert all(v == ext(2) for v in stopped.table.values())


# -- guards ---------------------------------------------------------------


def test_outcome_cap_enforced():
    wide = OutcomeSet(["a", "b", "c", "d", "e"])
    with pytest.raises(ValueError):
        GameSpec(wide, SupContent(wide), 2)
    GameSpec(wide, SupContent(wide), 2, outcome_cap=8)


def test_depth_cap_guards_dense_sweeps(monkeypatch):
    from gtprob.config import DepthCapError

    game = GameSpec(BIN, Measure.uniform(BIN), 40)
    with pytest.raises(DepthCapError):
        list(game.all_situations())
    monkeypatch.setenv("GTP_MAX_DEPTH", "41")
    assert sum(1 for _ in game.all_situations(3)) == 15
