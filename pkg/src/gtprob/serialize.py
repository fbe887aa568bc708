"""JSON and CSV codecs for the package's on-disk formats.

Numbers travel as exact strings: ``"p/q"`` in lowest terms (plain integers
as ``"p"``), ``"inf"``, ``"-inf"``.  Every encoder sorts its output so
identical inputs produce byte-identical files.

Formats:

* pricing functional: ``{"type": "measure", "probs": {label: "p/q"}}``,
  ``{"type": "sup"}``, ``{"type": "envelope", "measures": [probs, ...]}``,
  ``{"type": "table", "declared_level": ..., "entries": [{"gamble":
  {label: value}, "value": value}]}``;
* game: ``{"outcomes": [...], "horizon": N, "content": {...}}`` or with a
  per-round ``"contents"`` list;
* payoff: ``{"kind": "table", "depth": N, "values": {situation: value}}``,
  ``{"kind": "leading_ones_capped", "cap": "4"}``, ``{"kind":
  "indicator", "window": {...}}``, ``{"kind": "constant", "value": ...}``;
* event window: ``{"start": N, "end": M, "accepts": [[labels...], ...]}``;
* capital table: CSV with header ``situation,value``, the empty string for
  the root situation;
* forecaster protocol: ``{"outcomes": [...], "predictions": [[symbols],
  ...], "contents": {symbol: functional}, "horizon": N}``;
* forecasting system: ``{"kind": "constant", "value": p}``, ``{"kind":
  "table", "rule": {situation: p}}``, ``{"kind": "last-outcome", "map":
  {outcome: p}, "initial": p}``.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Any, Mapping

from gtprob.extreal import ExtReal, ext
from gtprob.functionals import (
    Envelope,
    Gamble,
    Measure,
    OutcomeSet,
    OuterContent,
    SupContent,
    TableContent,
)
from gtprob.gametree import (
    GameSpec,
    Situation,
    Supermartingale,
    format_situation,
    parse_situation,
)
from gtprob.expectation import EventWindow, Payoff, indicator
from gtprob.forecaster import ForecastingSystem, Protocol2Spec

__all__ = [
    "SchemaError",
    "content_to_json",
    "content_from_json",
    "game_to_json",
    "game_from_json",
    "window_to_json",
    "window_from_json",
    "payoff_from_json",
    "supermartingale_to_csv",
    "supermartingale_from_csv",
    "protocol2_from_json",
    "forecasting_system_from_json",
    "load_spec",
]


class SchemaError(ValueError):
    """Input violates a documented format; carries a JSON-pointer-ish path."""

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


def _fraction(raw: Any, where: str) -> Fraction:
    try:
        return Fraction(str(raw))
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(where, f"not an exact rational: {raw!r}") from exc


def _extreal(raw: Any, where: str) -> ExtReal:
    try:
        return ext(str(raw))
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise SchemaError(where, f"not an extended rational: {raw!r}") from exc


# -- pricing functionals ------------------------------------------------


def content_to_json(content: OuterContent) -> dict:
    if isinstance(content, Measure):
        return {
            "type": "measure",
            "probs": {lab: str(p) for lab, p in zip(content.outcomes, content.probs)},
        }
    if isinstance(content, Envelope):
        return {
            "type": "envelope",
            "measures": [
                {lab: str(p) for lab, p in zip(content.outcomes, m.probs)}
                for m in content.measures
            ],
        }
    if isinstance(content, SupContent):
        return {"type": "sup"}
    if isinstance(content, TableContent):
        entries = []
        for values, price in sorted(content._table.items(), key=lambda kv: tuple(map(str, kv[0]))):
            entries.append(
                {
                    "gamble": {lab: str(v) for lab, v in zip(content.outcomes, values)},
                    "value": str(price),
                }
            )
        return {
            "type": "table",
            "declared_level": content.declared_level,
            "entries": entries,
        }
    raise SchemaError("/", f"cannot serialize functional of type {type(content).__name__}")


def _probs_map(obj: Any, outcomes: OutcomeSet, where: str) -> dict[str, Fraction]:
    if not isinstance(obj, Mapping):
        raise SchemaError(where, "probabilities must be an object of label -> rational")
    out = {}
    for lab in obj:
        if lab not in outcomes:
            raise SchemaError(where, f"unknown outcome {lab!r}")
        out[lab] = _fraction(obj[lab], f"{where}/{lab}")
    return out


def content_from_json(obj: Any, outcomes: OutcomeSet, where: str = "/content") -> OuterContent:
    if not isinstance(obj, Mapping) or "type" not in obj:
        raise SchemaError(where, "functional must be an object with a 'type' field")
    kind = obj["type"]
    try:
        if kind == "measure":
            return Measure(outcomes, _probs_map(obj.get("probs"), outcomes, f"{where}/probs"))
        if kind == "sup":
            return SupContent(outcomes)
        if kind == "envelope":
            measures = obj.get("measures")
            if not isinstance(measures, list) or not measures:
                raise SchemaError(f"{where}/measures", "envelope needs a non-empty list")
            return Envelope(
                outcomes,
                [
                    Measure(outcomes, _probs_map(m, outcomes, f"{where}/measures/{i}"))
                    for i, m in enumerate(measures)
                ],
            )
        if kind == "table":
            entries = obj.get("entries")
            if not isinstance(entries, list):
                raise SchemaError(f"{where}/entries", "table needs an entry list")
            pairs = []
            for i, e in enumerate(entries):
                gam = e.get("gamble")
                if not isinstance(gam, Mapping):
                    raise SchemaError(f"{where}/entries/{i}", "entry needs a gamble object")
                g = Gamble.of(
                    outcomes,
                    {lab: _extreal(gam[lab], f"{where}/entries/{i}/{lab}") for lab in gam},
                )
                pairs.append((g, _extreal(e.get("value"), f"{where}/entries/{i}/value")))
            return TableContent(outcomes, pairs, obj.get("declared_level", "outer-content"))
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(where, str(exc)) from exc
    raise SchemaError(f"{where}/type", f"unknown functional type {kind!r}")


# -- games ------------------------------------------------------------------


def game_to_json(game: GameSpec) -> dict:
    base: dict[str, Any] = {
        "outcomes": list(game.outcomes.labels),
        "horizon": game.horizon,
    }
    if game.depth_independent:
        base["content"] = content_to_json(game.contents[0])
    else:
        base["contents"] = [content_to_json(c) for c in game.contents]
    return base


def game_from_json(obj: Any, where: str = "") -> GameSpec:
    if not isinstance(obj, Mapping):
        raise SchemaError(where or "/", "game must be an object")
    labels = obj.get("outcomes")
    if not isinstance(labels, list) or not labels:
        raise SchemaError(f"{where}/outcomes", "need a non-empty outcome list")
    try:
        outcomes = OutcomeSet(labels)
    except ValueError as exc:
        raise SchemaError(f"{where}/outcomes", str(exc)) from exc
    horizon = obj.get("horizon")
    if not isinstance(horizon, int) or horizon < 1:
        raise SchemaError(f"{where}/horizon", "horizon must be a positive integer")
    try:
        if "content" in obj:
            return GameSpec(outcomes, content_from_json(obj["content"], outcomes, f"{where}/content"), horizon)
        if "contents" in obj:
            rounds = obj["contents"]
            if not isinstance(rounds, list) or len(rounds) != horizon:
                raise SchemaError(f"{where}/contents", "need one functional per round")
            return GameSpec(
                outcomes,
                [
                    content_from_json(c, outcomes, f"{where}/contents/{i}")
                    for i, c in enumerate(rounds)
                ],
                horizon,
            )
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(where or "/", str(exc)) from exc
    raise SchemaError(where or "/", "game needs a 'content' or 'contents' field")


# -- events and payoffs --------------------------------------------------------


def window_to_json(event: EventWindow, outcomes: OutcomeSet) -> dict:
    return {
        "start": event.start,
        "end": event.end,
        "accepts": sorted(list(t) for t in event.accepts(outcomes)),
    }


def window_from_json(obj: Any, outcomes: OutcomeSet, where: str = "/window") -> EventWindow:
    if not isinstance(obj, Mapping):
        raise SchemaError(where, "window must be an object")
    start, end = obj.get("start"), obj.get("end")
    if not (isinstance(start, int) and isinstance(end, int)):
        raise SchemaError(where, "window needs integer start and end")
    accepts = obj.get("accepts")
    if not isinstance(accepts, list):
        raise SchemaError(f"{where}/accepts", "window needs an accept list")
    width = end - start + 1
    tuples = []
    for i, t in enumerate(accepts):
        if not isinstance(t, list) or len(t) != width:
            raise SchemaError(f"{where}/accepts/{i}", f"accept tuples must have length {width}")
        for lab in t:
            if lab not in outcomes:
                raise SchemaError(f"{where}/accepts/{i}", f"unknown outcome {lab!r}")
        tuples.append(tuple(t))
    try:
        return EventWindow(start, end, accepts=tuples)
    except ValueError as exc:
        raise SchemaError(where, str(exc)) from exc


def payoff_from_json(obj: Any, game: GameSpec, where: str = "/payoff") -> Payoff:
    if not isinstance(obj, Mapping) or "kind" not in obj:
        raise SchemaError(where, "payoff must be an object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "table":
            depth = obj.get("depth")
            if not isinstance(depth, int) or depth < 0:
                raise SchemaError(f"{where}/depth", "table payoff needs a depth")
            raw = obj.get("values")
            if not isinstance(raw, Mapping):
                raise SchemaError(f"{where}/values", "table payoff needs a values object")
            values = {
                parse_situation(k, game.outcomes): _extreal(v, f"{where}/values/{k}")
                for k, v in raw.items()
            }
            expected = len(game.outcomes) ** depth
            if len(values) != expected:
                raise SchemaError(
                    f"{where}/values", f"need all {expected} leaves at depth {depth}"
                )
            return Payoff.from_table(values, depth)
        if kind == "leading_ones_capped":
            cap = _fraction(obj.get("cap"), f"{where}/cap")
            depth = obj.get("depth", game.horizon)
            return Payoff.leading_ones_capped(cap, depth)
        if kind == "indicator":
            return indicator(window_from_json(obj.get("window"), game.outcomes, f"{where}/window"))
        if kind == "constant":
            depth = obj.get("depth", game.horizon)
            return Payoff.constant(_extreal(obj.get("value"), f"{where}/value"), depth)
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(where, str(exc)) from exc
    raise SchemaError(f"{where}/kind", f"unknown payoff kind {kind!r}")


# -- capital tables ---------------------------------------------------------------


def supermartingale_to_csv(sm: Supermartingale, outcomes: OutcomeSet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["situation", "value"])
    for s in sorted(sm.table, key=lambda u: (len(u), u)):
        writer.writerow([format_situation(s, outcomes), str(sm.table[s])])
    return buf.getvalue()


def supermartingale_from_csv(text: str, outcomes: OutcomeSet) -> Supermartingale:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or rows[0] != ["situation", "value"]:
        raise SchemaError("/csv", "expected header 'situation,value'")
    table: dict[Situation, ExtReal] = {}
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise SchemaError(f"/csv/{i}", f"expected two columns, got {row!r}")
        try:
            s = parse_situation(row[0], outcomes)
        except ValueError as exc:
            raise SchemaError(f"/csv/{i}", str(exc)) from exc
        table[s] = _extreal(row[1], f"/csv/{i}")
    if not table:
        raise SchemaError("/csv", "table is empty")
    depth = max(len(s) for s in table)
    for d in range(depth + 1):
        level = [s for s in table if len(s) == d]
        if len(level) != len(outcomes) ** d:
            raise SchemaError("/csv", f"table is not total at depth {d}")
    return Supermartingale(table, depth)


# -- forecaster specs ----------------------------------------------------------------


def protocol2_from_json(obj: Any, where: str = "") -> Protocol2Spec:
    if not isinstance(obj, Mapping):
        raise SchemaError(where or "/", "forecaster spec must be an object")
    labels = obj.get("outcomes")
    if not isinstance(labels, list) or not labels:
        raise SchemaError(f"{where}/outcomes", "need a non-empty outcome list")
    try:
        outcomes = OutcomeSet(labels)
    except ValueError as exc:
        raise SchemaError(f"{where}/outcomes", str(exc)) from exc
    menus = obj.get("predictions")
    if not isinstance(menus, list) or not menus:
        raise SchemaError(f"{where}/predictions", "need one prediction menu per round")
    raw_contents = obj.get("contents")
    if not isinstance(raw_contents, Mapping):
        raise SchemaError(f"{where}/contents", "need a symbol -> functional object")
    contents = {
        p: content_from_json(c, outcomes, f"{where}/contents/{p}")
        for p, c in raw_contents.items()
    }
    horizon = obj.get("horizon", len(menus))
    try:
        return Protocol2Spec(outcomes, menus, contents, horizon)
    except ValueError as exc:
        raise SchemaError(where or "/", str(exc)) from exc


def forecasting_system_from_json(
    obj: Any, spec: Protocol2Spec, where: str = "/system"
) -> ForecastingSystem:
    if not isinstance(obj, Mapping) or "kind" not in obj:
        raise SchemaError(where, "forecasting system must be an object with a 'kind'")
    kind = obj["kind"]
    if kind == "constant":
        return ForecastingSystem.constant(spec, str(obj.get("value")))
    if kind == "table":
        rule = obj.get("rule")
        if not isinstance(rule, Mapping):
            raise SchemaError(f"{where}/rule", "table system needs a rule object")
        parsed = {
            parse_situation(k, spec.outcomes): str(v) for k, v in rule.items()
        }
        return ForecastingSystem.from_table(spec, parsed)
    if kind == "last-outcome":
        mapping = obj.get("map")
        if not isinstance(mapping, Mapping):
            raise SchemaError(f"{where}/map", "last-outcome system needs an outcome map")
        return ForecastingSystem.last_outcome(
            spec, {str(k): str(v) for k, v in mapping.items()}, str(obj.get("initial"))
        )
    raise SchemaError(f"{where}/kind", f"unknown system kind {kind!r}")


def load_spec(path: str) -> GameSpec | Protocol2Spec:
    """Parse a spec file: a forecaster spec when a 'predictions' field is
    present, otherwise a basic game."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise SchemaError("/", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError("/", f"invalid JSON in {path}: {exc}") from exc
    if isinstance(obj, Mapping) and "predictions" in obj:
        return protocol2_from_json(obj)
    return game_from_json(obj)
