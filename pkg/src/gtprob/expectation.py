"""Exact conditional upper and lower expectations for finite-horizon payoffs.

A payoff settled after ``N`` rounds is a function of the first ``N``
outcomes.  Its conditional upper expectation at a situation ``s`` is the
least initial capital from which a bounded-below capital table can be
driven to cover the payoff on every continuation.  For such payoffs the
infimum is computed exactly by backward induction:

* at depth ``N`` the cover requirement pins the table to the payoff
  itself (any cheaper start at a leaf admits a continuation along which
  capital never recovers, by coherence of the pricing functionals);
* restricting attention to tables that stay constant after ``N`` loses
  nothing, because later play cannot help on every continuation at once;
* one round earlier the cheapest admissible value is the round's price of
  the children's values, and so on up the tree.

The resulting table prices its own children exactly at every node, i.e.
the conditional upper expectation is a martingale in the situation
argument; tests assert this identity rather than assuming it.

Lower expectation is the negation dual.  Upper/lower probability route an
event's indicator through the same machinery; the complement identity
``lower(E) = 1 - upper(complement of E)`` is asserted on every call.

A separate functional prices coverage in the running-maximum sense (the
capital must merely have touched the payoff's level at some time).  It is
computed by a two-argument dynamic program over (situation, best level
touched so far) and never exceeds the terminal-coverage price.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from gtprob import config
from gtprob.extreal import ExtReal, ONE, ZERO, ext
from gtprob.functionals import OutcomeSet
from gtprob.gametree import EMPTY, GameSpec, Situation, Supermartingale

__all__ = [
    "Payoff",
    "EventWindow",
    "indicator",
    "upper_expectation",
    "lower_expectation",
    "upper_table",
    "upper_probability",
    "lower_probability",
    "sup_variant_upper_expectation",
    "DeterminacyReport",
    "determinacy_check",
]


class Payoff:
    """A global payoff depending on the first ``depth`` outcomes.

    Backed by either an explicit leaf table or a rule; rule-backed payoffs
    can live beyond the dense cap, table materialization is guarded.
    """

    __slots__ = ("depth", "_fn", "kind", "meta")

    def __init__(self, depth: int, fn: Callable[[Situation], ExtReal], kind: str = "rule", meta=None):
        if depth < 0:
            raise ValueError("payoff depth must be nonnegative")
        self.depth = depth
        self._fn = fn
        self.kind = kind
        self.meta = meta

    @classmethod
    def from_table(cls, values: Mapping[Situation, object], depth: int) -> "Payoff":
        table = {tuple(s): ext(v) for s, v in values.items()}
        for s in table:
            if len(s) != depth:
                raise ValueError(f"table key {s!r} does not have depth {depth}")

        def fn(s: Situation) -> ExtReal:
            try:
                return table[s]
            except KeyError:
                raise KeyError(f"payoff table has no entry for {s!r}")

        return cls(depth, fn, kind="table", meta=table)

    @classmethod
    def from_rule(cls, fn: Callable[[Situation], ExtReal], depth: int) -> "Payoff":
        return cls(depth, fn, kind="rule")

    @classmethod
    def constant(cls, value, depth: int) -> "Payoff":
        v = ext(value)
        return cls(depth, lambda s: v, kind="constant", meta=v)

    @classmethod
    def leading_ones_capped(cls, cap, depth: int, one_label: str = "1") -> "Payoff":
        """Doubling run payoff: ``2**n`` for ``n`` leading ``one_label``
        outcomes, truncated at ``cap``.

        Needs ``2**depth >= cap`` so the all-ones leaf already tops the
        cap and the payoff genuinely depends on the first ``depth``
        coordinates only.
        """
        cap = Fraction(cap)
        if cap < 1:
            raise ValueError("cap must be at least 1")
        if Fraction(2) ** depth < cap:
            raise ValueError(f"depth {depth} too shallow for cap {cap}")

        def fn(s: Situation) -> ExtReal:
            n = 0
            for x in s:
                if x != one_label:
                    break
                n += 1
            return ext(min(Fraction(2) ** n, cap))

        return cls(depth, fn, kind="leading_ones_capped", meta=cap)

    def value(self, leaf: Situation) -> ExtReal:
        leaf = tuple(leaf)
        if len(leaf) != self.depth:
            raise ValueError(f"payoff is settled at depth {self.depth}, got {len(leaf)}")
        return self._fn(leaf)

    def negate(self) -> "Payoff":
        return Payoff(self.depth, lambda s: -self._fn(s), kind=f"neg({self.kind})")

    def shifted(self, c) -> "Payoff":
        d = ext(c)
        return Payoff(self.depth, lambda s: self._fn(s) + d, kind=f"shift({self.kind})")

    def leaf_values(self, game: GameSpec, depth_cap: int | None = None) -> list[ExtReal]:
        config.require_dense(self.depth, depth_cap, what="payoff tabulation")
        return [self._fn(s) for s in game.outcomes.tuples(self.depth)]

    def __repr__(self) -> str:
        return f"Payoff(depth={self.depth}, kind={self.kind})"


class EventWindow:
    """An event depending only on coordinates ``start..end`` (1-indexed).

    Membership is decided by an explicit accept set of coordinate tuples or
    by a predicate; predicate-backed windows can be arbitrarily long,
    materialization is guarded.
    """

    __slots__ = ("start", "end", "_accepts", "_pred", "label")

    def __init__(
        self,
        start: int,
        end: int,
        accepts: Iterable[tuple[str, ...]] | None = None,
        predicate: Callable[[tuple[str, ...]], bool] | None = None,
        label: str = "",
    ):
        if start < 1 or end < start:
            raise ValueError(f"need 1 <= start <= end, got [{start}, {end}]")
        if (accepts is None) == (predicate is None):
            raise ValueError("give exactly one of accepts or predicate")
        self.start = start
        self.end = end
        self._accepts = None if accepts is None else frozenset(tuple(t) for t in accepts)
        self._pred = predicate
        self.label = label

    @property
    def width(self) -> int:
        return self.end - self.start + 1

    def member_window(self, window: tuple[str, ...]) -> bool:
        if len(window) != self.width:
            raise ValueError(f"window tuple must have length {self.width}")
        if self._accepts is not None:
            return window in self._accepts
        return bool(self._pred(window))

    def member(self, outcomes_prefix: Situation) -> bool:
        """Membership from a prefix of play covering the window."""
        if len(outcomes_prefix) < self.end:
            raise ValueError("prefix does not cover the event window")
        return self.member_window(tuple(outcomes_prefix[self.start - 1 : self.end]))

    def accepts(self, outcomes: OutcomeSet, depth_cap: int | None = None) -> frozenset:
        if self._accepts is not None:
            return self._accepts
        config.require_dense(self.width, depth_cap, what="event materialization")
        return frozenset(t for t in outcomes.tuples(self.width) if self._pred(t))

    def complement(self) -> "EventWindow":
        if self._accepts is not None:
            # Complement within the window's tuple space; materialized lazily
            # through the predicate to stay outcome-set agnostic.
            acc = self._accepts
            return EventWindow(
                self.start, self.end, predicate=lambda w: w not in acc,
                label=f"not({self.label})" if self.label else "",
            )
        pred = self._pred
        return EventWindow(
            self.start, self.end, predicate=lambda w: not pred(w),
            label=f"not({self.label})" if self.label else "",
        )

    @staticmethod
    def union(events: Sequence["EventWindow"]) -> "EventWindow":
        """Union on the combined window (smallest covering both ends)."""
        if not events:
            raise ValueError("union of no events")
        start = min(e.start for e in events)
        end = max(e.end for e in events)

        def pred(window: tuple[str, ...]) -> bool:
            return any(
                e.member_window(window[e.start - start : e.end - start + 1]) for e in events
            )

        return EventWindow(start, end, predicate=pred, label="union")

    @classmethod
    def whole_space(cls) -> "EventWindow":
        return cls(1, 1, predicate=lambda w: True, label="omega")

    @classmethod
    def empty(cls) -> "EventWindow":
        return cls(1, 1, predicate=lambda w: False, label="empty")

    @classmethod
    def coordinate_is(cls, index: int, label: str) -> "EventWindow":
        return cls(index, index, accepts=[(label,)], label=f"w{index}={label}")

    def __repr__(self) -> str:
        name = f" {self.label!r}" if self.label else ""
        return f"EventWindow([{self.start}, {self.end}]{name})"


def indicator(event: EventWindow) -> Payoff:
    """The 0/1 payoff of an event, settled at the window's end."""

    def fn(s: Situation) -> ExtReal:
        return ONE if event.member(s) else ZERO

    return Payoff(event.end, fn, kind="indicator", meta=event)


# -- backward induction -------------------------------------------------


def _level_values(
    game: GameSpec, xi: Payoff, s: Situation, depth_cap: int | None = None
) -> ExtReal:
    """Backward induction over the subtree below ``s``."""
    span = xi.depth - len(s)
    config.require_dense(span, depth_cap, what="conditional expectation sweep")
    level = [xi.value(s + rest) for rest in game.outcomes.tuples(span)]
    k = len(game.outcomes)
    for d in range(xi.depth - 1, len(s) - 1, -1):
        content = game.content_at(d + 1)
        level = [
            content.eval_seq(level[i * k : (i + 1) * k]) for i in range(len(level) // k)
        ]
    assert len(level) == 1
    return level[0]


def upper_expectation(
    game: GameSpec, xi: Payoff, s: Situation = EMPTY, depth_cap: int | None = None
) -> ExtReal:
    """Conditional upper expectation of ``xi`` given situation ``s``.

    At depth ``xi.depth`` this is the payoff itself; above it, the round
    price of the children's values.
    """
    s = game.validate_situation(s)
    if xi.depth > game.horizon:
        raise ValueError("payoff settles beyond the game horizon")
    if len(s) >= xi.depth:
        return xi.value(s[: xi.depth])
    return _level_values(game, xi, s, depth_cap)


def lower_expectation(
    game: GameSpec, xi: Payoff, s: Situation = EMPTY, depth_cap: int | None = None
) -> ExtReal:
    """Negation dual: ``-upper(-xi)``."""
    return -upper_expectation(game, xi.negate(), s, depth_cap)


def upper_table(
    game: GameSpec, xi: Payoff, depth_cap: int | None = None
) -> Supermartingale:
    """The full table of conditional upper expectations, depths 0..xi.depth.

    This is the exact cover of ``xi`` with the least start, and it prices
    its own children exactly at every node.
    """
    config.require_dense(xi.depth, depth_cap, what="conditional expectation table")
    table: dict[Situation, ExtReal] = {}
    level = {s: xi.value(s) for s in game.outcomes.tuples(xi.depth)}
    table.update(level)
    for d in range(xi.depth - 1, -1, -1):
        content = game.content_at(d + 1)
        level = {
            s: content.eval_seq([table[s + (x,)] for x in game.outcomes.labels])
            for s in game.outcomes.tuples(d)
        }
        table.update(level)
    return Supermartingale(table, xi.depth)


def upper_probability(
    game: GameSpec, event: EventWindow, s: Situation = EMPTY, depth_cap: int | None = None
) -> ExtReal:
    return upper_expectation(game, indicator(event), s, depth_cap)


def lower_probability(
    game: GameSpec, event: EventWindow, s: Situation = EMPTY, depth_cap: int | None = None
) -> ExtReal:
    """Lower probability via the negation dual, with the complement
    identity ``lower(E) = 1 - upper(E^c)`` asserted on every call."""
    low = lower_expectation(game, indicator(event), s, depth_cap)
    dual = ONE - upper_probability(game, event.complement(), s, depth_cap)
    if low != dual:
        raise AssertionError(
            f"complement identity violated at {s!r}: lower={low}, 1-upper(complement)={dual}"
        )
    return low


# -- running-maximum coverage ---------------------------------------------


def sup_variant_upper_expectation(
    game: GameSpec, xi: Payoff, depth_cap: int | None = None
) -> ExtReal:
    """Least start of a nonnegative capital table whose running maximum
    reaches the payoff's level on every path.

    Two-argument dynamic program: the state is (situation, best level
    already touched), where only levels in the payoff's finite value set
    matter.  The value is the least ``c`` with
    ``c >= price(children at best level max(theta, c))``; since the price
    side is a step function of ``c`` with breakpoints in the value set,
    the least fixed point is found by an ascending scan over the
    breakpoint regions, returning the smallest admissible ``c``.

    Terminal-coverage price always dominates this one.  Payoffs must be
    finite-valued; nonpositive levels are covered for free because capital
    is nonnegative.
    """
    if xi.depth > game.horizon:
        raise ValueError("payoff settles beyond the game horizon")
    span = xi.depth
    config.require_dense(span, depth_cap, what="running-maximum dynamic program")
    leaf_vals: dict[Situation, ExtReal] = {
        s: xi.value(s) for s in game.outcomes.tuples(span)
    }
    for s, v in leaf_vals.items():
        if not v.is_finite:
            raise ValueError(f"payoff must be finite-valued, got {v} at {s!r}")
    thresholds = sorted({Fraction(0)} | {v.finite for v in leaf_vals.values() if v.finite > 0})

    # Largest level needed anywhere below each node; a state whose touched
    # level already covers its whole subtree is worth zero outright.
    submax: dict[Situation, Fraction] = {s: v.finite for s, v in leaf_vals.items()}
    for d in range(span - 1, -1, -1):
        for s in game.outcomes.tuples(d):
            submax[s] = max(submax[s + (x,)] for x in game.outcomes.labels)

    def canon(q: Fraction) -> int:
        # Largest threshold index not above q; q >= 0 always holds here.
        lo, hi = 0, len(thresholds) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if thresholds[mid] <= q:
                lo = mid
            else:
                hi = mid - 1
        return lo

    memo: dict[tuple[Situation, int], ExtReal] = {}

    def value(s: Situation, theta_idx: int) -> ExtReal:
        key = (s, theta_idx)
        if key in memo:
            return memo[key]
        if thresholds[theta_idx] >= submax[s]:
            memo[key] = ZERO
            return ZERO
        if len(s) == span:
            target = leaf_vals[s]
            out = ZERO if ext(thresholds[theta_idx]) >= target else target
            memo[key] = out
            return out
        content = game.content_at(len(s) + 1)
        result: ExtReal | None = None
        for j in range(len(thresholds)):
            eff = max(theta_idx, j)
            kids = [value(s + (x,), eff) for x in game.outcomes.labels]
            g = content.eval_seq(kids)
            candidate = max(ext(thresholds[j]), g)
            if j + 1 < len(thresholds) and not (candidate < ext(thresholds[j + 1])):
                continue
            result = candidate
            break
        assert result is not None
        memo[key] = result
        return result

    if span == 0:
        v = xi.value(EMPTY)
        if not v.is_finite:
            raise ValueError("payoff must be finite-valued")
        return v if v > ZERO else ZERO
    return value(EMPTY, 0)


# -- determinacy -----------------------------------------------------------


@dataclass
class DeterminacyReport:
    depth: int
    gaps: list[tuple[Situation, ExtReal, ExtReal]] = field(default_factory=list)
    note: str = "finite-horizon surrogate: determinacy certified up to the stated depth only"

    @property
    def determinate(self) -> bool:
        return not self.gaps

    def __str__(self) -> str:
        if self.determinate:
            return f"determinate at every situation up to depth {self.depth}; {self.note}"
        lines = [f"{len(self.gaps)} gap(s) up to depth {self.depth}:"]
        for s, up, low in self.gaps:
            lines.append(f"  {s!r}: upper={up}, lower={low}, gap={up - low}")
        return "\n".join(lines)


def determinacy_check(
    game: GameSpec, xi: Payoff, depth: int, depth_cap: int | None = None
) -> DeterminacyReport:
    """List every situation up to ``depth`` where upper and lower
    expectations disagree; an empty list certifies determinacy at this
    truncation."""
    if depth > xi.depth:
        depth = xi.depth
    up = upper_table(game, xi, depth_cap)
    down = upper_table(game, xi.negate(), depth_cap)
    report = DeterminacyReport(depth=depth)
    for s in game.all_situations(depth, depth_cap):
        u = up.value(s)
        l = -down.value(s)
        if u != l:
            report.gaps.append((s, u, l))
    return report
