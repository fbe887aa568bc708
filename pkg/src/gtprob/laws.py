"""Finite-horizon checks of zero-one phenomena, and the fixtures they need.

True tail events live beyond any finite horizon, so every law here is
exercised through its finite-horizon skeleton: exact terminal agreement of
conditional values with the payoff, invariance of conditional values
across prefixes the event ignores, the shift inequality for events closed
under dropping a prefix, and the growth of the multiplicative ride on
scripted oscillations.  Report vocabulary says "finite-horizon surrogate"
wherever the asymptotic statement itself is out of reach.

:func:`scripted_conditional_game` manufactures a measure game and an event
whose conditional upper probability along a distinguished path follows a
prescribed target sequence exactly; it feeds the growth checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from gtprob import config
from gtprob.extreal import ExtReal, ONE, ZERO, ext
from gtprob.functionals import Measure, OutcomeSet
from gtprob.gametree import (
    EMPTY,
    GameSpec,
    Situation,
    format_situation,
    shift_strategy,
    translate_strategy,
    verify_supermartingale,
)
from gtprob.expectation import (
    EventWindow,
    Payoff,
    indicator,
    lower_probability,
    upper_probability,
    upper_table,
)

__all__ = [
    "LevyExperimentReport",
    "levy_experiment",
    "InvarianceReport",
    "kolmogorov_invariance",
    "ShiftBoundReport",
    "ergodic_bound",
    "ScriptedGame",
    "scripted_conditional_game",
    "ClassifyReport",
    "zero_one_classify",
]

SURROGATE_NOTE = "finite-horizon surrogate"


# -- conditional convergence skeleton ------------------------------------


@dataclass
class LevyPathRow:
    path: Situation
    values: list[ExtReal]
    terminal_ok: bool
    in_event: bool | None = None
    reaches_one: bool | None = None


@dataclass
class LevyExperimentReport:
    rows: list[LevyPathRow] = field(default_factory=list)
    note: str = (
        f"{SURROGATE_NOTE}: conditional values listed to the payoff depth, "
        "where they equal the payoff exactly"
    )

    @property
    def all_terminal_ok(self) -> bool:
        return all(r.terminal_ok for r in self.rows)

    def trace_rows(self, outcomes: OutcomeSet) -> list[tuple[int, str, str]]:
        out = []
        for r in self.rows:
            for n, v in enumerate(r.values):
                out.append((n, format_situation(r.path[:n], outcomes), str(v)))
        return out

    def to_json(self, outcomes: OutcomeSet) -> dict:
        return {
            "note": self.note,
            "paths": [
                {
                    "path": format_situation(r.path, outcomes),
                    "values": [str(v) for v in r.values],
                    "terminal_ok": r.terminal_ok,
                    "in_event": r.in_event,
                    "reaches_one": r.reaches_one,
                }
                for r in self.rows
            ],
        }

    def __str__(self) -> str:
        lines = []
        for r in self.rows:
            seq = ", ".join(str(v) for v in r.values)
            flag = "" if r.in_event is None else (
                f" (in event: {r.in_event}, reaches 1: {r.reaches_one})"
            )
            lines.append(f"{''.join(r.path) or 'root'}: {seq}{flag}")
        lines.append(self.note)
        return "\n".join(lines)


def levy_experiment(
    game: GameSpec, xi: Payoff, paths: Sequence[Situation], depth_cap: int | None = None
) -> LevyExperimentReport:
    """Conditional upper expectations along each path, with the exact
    terminal check, plus event-reaching flags for indicator payoffs."""
    table = upper_table(game, xi, depth_cap)
    report = LevyExperimentReport()
    event = xi.meta if xi.kind == "indicator" else None
    for raw in paths:
        path = game.validate_situation(tuple(raw))
        if len(path) != xi.depth:
            raise ValueError(
                f"paths must have the payoff depth {xi.depth}, got {len(path)}"
            )
        values = [table.value(path[:n]) for n in range(xi.depth + 1)]
        terminal_ok = values[-1] == xi.value(path)
        row = LevyPathRow(path, values, terminal_ok)
        if event is not None:
            row.in_event = event.member(path)
            row.reaches_one = any(v == ONE for v in values)
        report.rows.append(row)
    return report


# -- invariance across ignored prefixes -----------------------------------


@dataclass
class InvarianceReport:
    start_depth: int
    values: dict[Situation, ExtReal]
    invariant: bool
    witness_pair: tuple[Situation, Situation] | None
    witness_ok: bool | None
    note: str = f"{SURROGATE_NOTE}: invariance checked across one prefix level"

    def __str__(self) -> str:
        head = "invariant" if self.invariant else "NOT invariant"
        vals = ", ".join(f"{''.join(s) or 'root'}: {v}" for s, v in sorted(self.values.items()))
        wit = "" if self.witness_ok is None else f"; relocation witness ok: {self.witness_ok}"
        return f"{head} at prefix depth {self.start_depth - 1} [{vals}]{wit}; {self.note}"

    def to_json(self) -> dict:
        return {
            "start_depth": self.start_depth,
            "values": {"".join(s): str(v) for s, v in sorted(self.values.items())},
            "invariant": self.invariant,
            "witness_ok": self.witness_ok,
            "note": self.note,
        }


def kolmogorov_invariance(
    game: GameSpec, event: EventWindow, depth_cap: int | None = None
) -> InvarianceReport:
    """Conditional upper probability of an event that ignores the first
    ``start - 1`` coordinates, computed at every prefix of that depth.

    Passes when all values agree.  Additionally relocates the exact
    conditional table from one prefix to another and verifies it still
    covers the event there at the same start value, witnessing the
    equality constructively.
    """
    n = event.start
    prefix_depth = n - 1
    config.require_dense(prefix_depth, depth_cap, what="prefix sweep")
    values: dict[Situation, ExtReal] = {}
    for s in game.outcomes.tuples(prefix_depth):
        values[s] = upper_probability(game, event, s, depth_cap)
    distinct = {str(v) for v in values.values()}
    invariant = len(distinct) == 1

    witness_pair = None
    witness_ok = None
    prefixes = sorted(values)
    if len(prefixes) >= 2:
        s, t = prefixes[0], prefixes[1]
        witness_pair = (s, t)
        table = upper_table(game, indicator(event), depth_cap)
        moved = translate_strategy(table, s, t)
        ok = verify_supermartingale(game, moved, depth_cap).ok
        ok = ok and moved.value(t) == values[s]
        xi = indicator(event)
        for rest in game.outcomes.tuples(event.end - prefix_depth):
            leaf = t + rest
            ok = ok and moved.value(leaf) == xi.value(s + rest)
            ok = ok and xi.value(s + rest) == xi.value(leaf)
        witness_ok = ok
    return InvarianceReport(n, values, invariant, witness_pair, witness_ok)


# -- shift bound for weakly invariant events --------------------------------


@dataclass
class ShiftBoundReport:
    situation: Situation
    condition_holds: bool
    counterexample: Situation | None
    conditional: ExtReal | None
    unconditional: ExtReal | None
    bound_holds: bool | None
    witness_ok: bool | None
    note: str = (
        f"{SURROGATE_NOTE}: the drop-prefix condition is enumerated on the "
        "event's window and the bound asserted at this truncation"
    )

    def __str__(self) -> str:
        if not self.condition_holds:
            return (
                f"drop-prefix condition fails at continuation {self.counterexample!r}; "
                f"{self.note}"
            )
        return (
            f"conditional {self.conditional} <= unconditional {self.unconditional}: "
            f"{self.bound_holds}; replay witness ok: {self.witness_ok}; {self.note}"
        )

    def to_json(self) -> dict:
        return {
            "situation": "".join(self.situation),
            "condition_holds": self.condition_holds,
            "counterexample": None if self.counterexample is None else "".join(self.counterexample),
            "conditional": None if self.conditional is None else str(self.conditional),
            "unconditional": None if self.unconditional is None else str(self.unconditional),
            "bound_holds": self.bound_holds,
            "witness_ok": self.witness_ok,
            "note": self.note,
        }


def ergodic_bound(
    game: GameSpec, event: EventWindow, s: Situation, depth_cap: int | None = None
) -> ShiftBoundReport:
    """For a game priced identically at every round, check by enumeration
    that prefixing ``s`` can only leave the event (membership of ``s + w``
    implies membership of ``w``), then assert that conditioning on ``s``
    cannot raise the event's upper probability, exhibiting the replayed
    table as the witness."""
    if not game.depth_independent:
        raise ValueError("shift bound needs the same pricing functional at every round")
    s = game.validate_situation(s)
    m = event.end
    config.require_dense(m, depth_cap, what="shift condition enumeration")
    counterexample = None
    for w in game.outcomes.tuples(m):
        if event.member(s + w) and not event.member(w):
            counterexample = w
            break
    if counterexample is not None:
        return ShiftBoundReport(s, False, counterexample, None, None, None, None)

    unconditional = upper_probability(game, event, EMPTY, depth_cap)
    deep = GameSpec(game.outcomes, game.contents[0], len(s) + m)
    conditional = upper_probability(deep, event, s, depth_cap)
    bound_holds = conditional <= unconditional

    table = upper_table(game, indicator(event), depth_cap)
    moved = shift_strategy(deep, table, s)
    ok = verify_supermartingale(deep, moved, depth_cap).ok
    ok = ok and moved.value(s) == unconditional
    xi = indicator(event)
    for w in game.outcomes.tuples(m):
        leaf = s + w
        covered = moved.value(leaf) >= (ONE if event.member(leaf) else ZERO)
        ok = ok and covered
    return ShiftBoundReport(s, True, None, conditional, unconditional, bound_holds, ok)


# -- scripted fixtures ---------------------------------------------------------


@dataclass
class ScriptedGame:
    """A measure game whose conditional upper probability of ``event``
    along ``path`` equals ``targets`` exactly at depths 0..N-1 and resolves
    at depth N.

    ``cond`` computes the conditional at any situation in O(depth) without
    touching the tree, so fixtures may run far beyond the dense cap.
    """

    game: GameSpec
    event: EventWindow
    path: Situation
    targets: list[Fraction]
    cond: Callable[[Situation], ExtReal]


def scripted_conditional_game(
    targets: Sequence[Fraction | str | int],
    distinguished: Sequence[str] | None = None,
) -> ScriptedGame:
    """Build a binary measure game realizing a prescribed conditional
    sequence along a distinguished path.

    Each step splits the current target into the next one on the
    distinguished branch and a closed-form value off it: 0 under a rise, 1
    under a fall, and the unchanged value (carried forward) under a flat
    step.  Carried values must eventually coincide with a step probability
    to resolve into event membership; if one survives to the horizon the
    prescription is infeasible and construction fails.
    """
    targets = [Fraction(t) for t in targets]
    if not targets:
        raise ValueError("need at least one target")
    if any(not (0 < t < 1) for t in targets):
        raise ValueError(f"targets must lie strictly inside (0, 1): {targets}")
    n_steps = len(targets)
    outcomes = OutcomeSet(["0", "1"])
    path = tuple(distinguished) if distinguished is not None else ("1",) * n_steps
    if len(path) != n_steps or any(x not in ("0", "1") for x in path):
        raise ValueError("distinguished path must be binary with one move per target")

    # Step probabilities of the distinguished branch, and the off-branch
    # state introduced at each step: 0, 1, or a carried fraction.
    probs: list[Fraction] = []
    off_state: list[Fraction | int] = []
    for i in range(1, n_steps):
        prev, cur = targets[i - 1], targets[i]
        if cur == prev:
            probs.append(Fraction(1, 2))
            off_state.append(prev)
        elif cur > prev:
            probs.append(prev / cur)
            off_state.append(0)
        else:
            probs.append((1 - prev) / (1 - cur))
            off_state.append(1)
    # Resolution step: the distinguished leaf joins the event.
    probs.append(targets[-1])
    off_state.append(0)

    # Resolve carried values: the first later step whose branch
    # probabilities match decides membership by that coordinate.
    resolution: dict[int, tuple[int, str]] = {}
    for i, state in enumerate(off_state):
        if isinstance(state, Fraction) and not isinstance(state, int):
            depth = i + 1  # carried from this step's off-branch
            for m in range(depth + 1, n_steps + 1):
                p_d = probs[m - 1]
                if state == p_d:
                    resolution[depth] = (m, path[m - 1])
                    break
                if state == 1 - p_d:
                    other = "0" if path[m - 1] == "1" else "1"
                    resolution[depth] = (m, other)
                    break
            else:
                raise ValueError(
                    f"infeasible prescription: carried value {state} introduced at "
                    f"step {depth} never matches a later step probability"
                )

    def walk(seq: Situation) -> tuple[str, object]:
        """State after playing ``seq``: on-path, absorbed 0/1, or carried."""
        for i, x in enumerate(seq):
            if x == path[i]:
                continue
            state = off_state[i]
            if state in (0, 1):
                return ("absorbed", state)
            depth = i + 1
            m, in_branch = resolution[depth]
            if len(seq) < m:
                return ("carried", (state, m, in_branch))
            return ("absorbed", 1 if seq[m - 1] == in_branch else 0)
        return ("on-path", None)

    def member(window: tuple[str, ...]) -> bool:
        kind, info = walk(window)
        if kind == "on-path":
            return True
        if kind == "absorbed":
            return bool(info)
        raise AssertionError("full windows always resolve")

    def cond(s: Situation) -> ExtReal:
        s = tuple(s)
        if len(s) > n_steps:
            s = s[:n_steps]
        kind, info = walk(s)
        if kind == "on-path":
            return ONE if len(s) == n_steps else ext(targets[len(s)])
        if kind == "absorbed":
            return ONE if info else ZERO
        value, _m, _branch = info
        return ext(value)

    contents = [
        Measure(outcomes, {path[i]: probs[i], _other(path[i]): 1 - probs[i]})
        for i in range(n_steps)
    ]
    game = GameSpec(outcomes, contents, n_steps)
    event = EventWindow(1, n_steps, predicate=member, label="scripted")
    return ScriptedGame(game, event, path, targets, cond)


def _other(label: str) -> str:
    return "0" if label == "1" else "1"


# -- interval classification -----------------------------------------------


@dataclass
class ClassifyReport:
    rows: list[tuple[int, ExtReal, ExtReal, str]]
    note: str = (
        f"{SURROGATE_NOTE}: window events settle at their window's end; the "
        "classification cannot see genuine tail behaviour"
    )

    @property
    def classification(self) -> str:
        kinds = {r[3] for r in self.rows}
        return kinds.pop() if len(kinds) == 1 else "mixed"

    def __str__(self) -> str:
        lines = [
            f"horizon {h}: [{lo}, {hi}] -> {kind}" for h, lo, hi, kind in self.rows
        ]
        lines.append(self.note)
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "rows": [
                {"horizon": h, "lower": str(lo), "upper": str(hi), "class": kind}
                for h, lo, hi, kind in self.rows
            ],
            "classification": self.classification,
            "note": self.note,
        }


def _classify(lo: ExtReal, hi: ExtReal) -> str:
    if lo == ONE and hi == ONE:
        return "almost-certain"
    if lo == ZERO and hi == ZERO:
        return "almost-impossible"
    if lo == ZERO and hi == ONE:
        return "fully-unprobabilized"
    return f"undetermined [{lo}, {hi}]"


def zero_one_classify(
    game: GameSpec,
    event: EventWindow,
    horizons: Sequence[int] | None = None,
    depth_cap: int | None = None,
) -> ClassifyReport:
    """Probability interval of the event at each horizon, classified as
    almost certain ({1}), almost impossible ({0}), fully unprobabilized
    ([0, 1]), or honestly undetermined."""
    hs = list(horizons) if horizons is not None else [game.horizon]
    rows = []
    for h in hs:
        if h < event.end or h > game.horizon:
            raise ValueError(
                f"horizon {h} must cover the event window end {event.end} "
                f"and stay within the game horizon {game.horizon}"
            )
        hi = upper_probability(game, event, EMPTY, depth_cap)
        lo = lower_probability(game, event, EMPTY, depth_cap)
        rows.append((h, lo, hi, _classify(lo, hi)))
    return ClassifyReport(rows)
