#!/usr/bin/env python3
"""Capital processes and the two strategy engines.

The additive engine banks a base process's oscillations across a band
(buy back in low, freeze high); the multiplicative engine waits for the
conditional expectation of a payoff to drop below `a`, rides it until it
tops `b`, and compounds the ratio each cycle.  Both produce tables that
pass the supermartingale check, and both emit the cuts where they acted.
"""

from fractions import Fraction

from gtprob import ext
from gtprob.functionals import Measure, OutcomeSet
from gtprob.gametree import (
    GameSpec,
    Strategy,
    Supermartingale,
    capital_process,
    format_situation,
    verify_supermartingale,
)
from gtprob.expectation import EventWindow, indicator
from gtprob.strategies import (
    doob_upcrossing,
    enumerate_intervals,
    levy_strategy,
    mixture,
)

space = OutcomeSet(["0", "1"])
game = GameSpec(space, Measure.uniform(space), 4)

print("double-or-nothing on outcome 1, path 1,0:")
caps = capital_process(game, Strategy.double_on(game, "1"), ("1", "0"))
print(f"  capitals: {', '.join(str(c) for c in caps)}")


def multiplier(up, down):
    def fn(s):
        v = Fraction(1)
        for x in s:
            v *= up if x == "1" else down
        return ext(v)

    return Supermartingale.from_fn(game, fn)


base = multiplier(Fraction(3, 2), Fraction(1, 2))
print("\nadditive upcross capture, band (4/5, 6/5), base x3/2 on 1 and x1/2 on 0:")
res = doob_upcrossing(game, base, Fraction(4, 5), Fraction(6, 5))
path = ("1", "0", "1", "1")
for n in range(5):
    s = path[:n]
    print(
        f"  {format_situation(s, space) or 'start':>5s}: base={base.value(s)}, capital={res.table.value(s)}"
    )
def show_cut(cut):
    return "{" + ", ".join(format_situation(s, space) or "start" for s in cut) + "}"


print(f"  upcross cuts: {[show_cut(c) for c in res.trace.sigma[1:]]}")
print(f"  verifies: {verify_supermartingale(game, res.table).ok}")

print("\nfirst enumerated bands feed a weighted mixture:")
parts = [doob_upcrossing(game, base, a, b, check_base=False) for a, b in enumerate_intervals(4)]
mix = mixture(parts)
print(f"  start value {mix.table.value(())}, {mix.note}")
print(f"  verifies: {verify_supermartingale(game, mix.table).ok}")

print("\nmultiplicative ride on the event 'third outcome is 1', band (3/5, 9/10):")
game3 = GameSpec(space, Measure.uniform(space), 3)
xi = indicator(EventWindow.coordinate_is(3, "1"))
levy = levy_strategy(game3, xi, Fraction(3, 5), Fraction(9, 10))
for path in [("1", "1", "1"), ("0", "0", "0")]:
    vals = ", ".join(str(levy.table.value(path[:n])) for n in range(4))
    print(f"  along {''.join(path)}: {vals}")
print(f"  entry cut: {show_cut(levy.trace.tau[1])}")
print(f"  verifies: {verify_supermartingale(game3, levy.table).ok}")
