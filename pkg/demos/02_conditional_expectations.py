#!/usr/bin/env python3
"""Exact conditional upper and lower expectations by backward induction.

A payoff settled after N rounds is priced at any situation by folding the
round functionals from the leaves up.  Under a probability measure the
upper and lower values agree with the classical conditional expectation;
under the worst-case functional they split into a genuine interval.

The running-maximum variant prices a weaker requirement (the capital only
has to touch the payoff's level at some time, not hold it at the end); on
the doubling-run payoff the gap between the two prices is extreme.
"""

from fractions import Fraction

from gtprob.functionals import Measure, OutcomeSet, SupContent
from gtprob.gametree import GameSpec
from gtprob.expectation import (
    EventWindow,
    Payoff,
    determinacy_check,
    indicator,
    lower_expectation,
    sup_variant_upper_expectation,
    upper_expectation,
)

space = OutcomeSet(["0", "1"])
coin = GameSpec(space, Measure.uniform(space), 6)
worst = GameSpec(space, SupContent(space), 6)

second_is_one = indicator(EventWindow.coordinate_is(2, "1"))
print("event 'second outcome is 1':")
for name, game in (("coin", coin), ("worst-case", worst)):
    hi = upper_expectation(game, second_is_one)
    lo = lower_expectation(game, second_is_one)
    print(f"  {name:10s} upper={hi}  lower={lo}")

print("\nconditioning updates the value as outcomes arrive:")
for prefix in [(), ("0",), ("0", "1")]:
    v = upper_expectation(coin, second_is_one, prefix)
    print(f"  after {''.join(prefix) or 'nothing'}: {v}")

print("\nthe capped doubling run (2**n for n leading ones, capped):")
for k in range(1, 7):
    xi = Payoff.leading_ones_capped(Fraction(2) ** k, k)
    game = GameSpec(space, Measure.uniform(space), k)
    terminal = upper_expectation(game, xi)
    touch = sup_variant_upper_expectation(game, xi)
    print(f"  cap 2**{k}: hold-at-the-end price {terminal}, touch price {touch}")

print("\ndeterminacy check (upper == lower everywhere?):")
xi = Payoff.from_table(
    {leaf: Fraction(i % 3, 2) for i, leaf in enumerate(space.tuples(3))}, 3
)
small_coin = GameSpec(space, Measure.uniform(space), 3)
small_worst = GameSpec(space, SupContent(space), 3)
print(f"  coin:       {determinacy_check(small_coin, xi, 2)}")
report = determinacy_check(small_worst, xi, 1)
print(f"  worst-case: {len(report.gaps)} gap(s), first at {report.gaps[0][:1]}")
