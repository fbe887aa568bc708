import json

import pytest

from gtprob.extreal import INF, ext
from gtprob.functionals import Envelope, Gamble, Measure, OutcomeSet, SupContent, TableContent
from gtprob.gametree import GameSpec, Supermartingale
from gtprob.expectation import EventWindow
from gtprob.serialize import (
    SchemaError,
    content_from_json,
    content_to_json,
    game_from_json,
    game_to_json,
    payoff_from_json,
    protocol2_from_json,
    supermartingale_from_csv,
    supermartingale_to_csv,
    window_from_json,
    window_to_json,
)

BIN = OutcomeSet(["0", "1"])


def test_content_round_trips():
    contents = [
        Measure(BIN, {"0": "1/2", "1": "1/2"}),
        Measure(BIN, {"0": "1/3", "1": "2/3"}),
        SupContent(BIN),
        Envelope(BIN, [{"0": "3/4", "1": "1/4"}, {"0": "0", "1": "1"}]),
        TableContent(BIN, [(Gamble.of(BIN, [0, 1]), ext("1/2")), (Gamble.of(BIN, [1, INF]), INF)]),
    ]
    for c in contents:
        blob = json.dumps(content_to_json(c), sort_keys=True)
        back = content_from_json(json.loads(blob), BIN)
        for g in [Gamble.of(BIN, [0, 1]), Gamble.of(BIN, [1, INF])]:
            try:
                expected = c.eval(g)
            except KeyError:
                continue
            assert back.eval(g) == expected


def test_game_round_trip_shared_and_per_round():
    shared = GameSpec(BIN, Measure.uniform(BIN), 3)
    back = game_from_json(game_to_json(shared))
    assert back.horizon == 3 and back.depth_independent
    per_round = GameSpec(
        BIN, [Measure.uniform(BIN), SupContent(BIN), Measure.uniform(BIN)], 3
    )
    back = game_from_json(game_to_json(per_round))
    assert not back.depth_independent
    assert isinstance(back.content_at(2), SupContent)


def test_window_round_trip():
    w = EventWindow(2, 3, predicate=lambda t: t[0] == t[1])
    blob = window_to_json(w, BIN)
    back = window_from_json(blob, BIN)
    assert back.accepts(BIN) == w.accepts(BIN)
    assert back.start == 2 and back.end == 3


def test_payoff_parsing_kinds():
    game = GameSpec(BIN, Measure.uniform(BIN), 2)
    table = payoff_from_json(
        {"kind": "table", "depth": 1, "values": {"0": "0", "1": "1/2"}}, game
    )
    assert table.value(("1",)) == ext("1/2")
    capped = payoff_from_json({"kind": "leading_ones_capped", "cap": "4"}, game)
    assert capped.value(("1", "1")) == ext(4)
    ind = payoff_from_json(
        {"kind": "indicator", "window": {"start": 1, "end": 1, "accepts": [["1"]]}}, game
    )
    assert ind.value(("1",)) == ext(1)
    const = payoff_from_json({"kind": "constant", "value": "-inf"}, game)
    assert const.value(("0", "0")).is_neg_inf


def test_payoff_table_must_be_total():
    game = GameSpec(BIN, Measure.uniform(BIN), 2)
    with pytest.raises(SchemaError):
        payoff_from_json({"kind": "table", "depth": 1, "values": {"0": "0"}}, game)


def test_supermartingale_csv_round_trip():
    game = GameSpec(BIN, Measure.uniform(BIN), 2)
    sm = Supermartingale.from_fn(game, lambda s: ext(len(s)) + ext("1/3"))
    text = supermartingale_to_csv(sm, BIN)
    back = supermartingale_from_csv(text, BIN)
    assert back.table == sm.table
    assert supermartingale_to_csv(back, BIN) == text


def test_supermartingale_csv_rejects_partial_tables():
    with pytest.raises(SchemaError):
        supermartingale_from_csv("situation,value\n,1\n0,1\n", BIN)


def test_protocol2_parsing_and_errors():
    spec = protocol2_from_json(
        {
            "outcomes": ["0", "1"],
            "predictions": [["a", "b"], ["a"]],
            "contents": {
                "a": {"type": "measure", "probs": {"0": "1/2", "1": "1/2"}},
                "b": {"type": "sup"},
            },
        }
    )
    assert spec.horizon == 2
    assert spec.menu_at(1) == ("a", "b")
    with pytest.raises(SchemaError):
        protocol2_from_json({"outcomes": ["0"], "predictions": [["a"]], "contents": {}})


def test_envelope_with_empty_measures_is_a_schema_error():
    with pytest.raises(SchemaError):
        content_from_json({"type": "envelope", "measures": []}, BIN)
