"""Pricing functionals on gambles over a finite outcome set.

A gamble assigns an extended-real payoff to each outcome.  A pricing
functional ``E`` maps gambles to extended reals and is audited against
four axioms:

1. monotone: ``f <= g`` implies ``E(f) <= E(g)``;
2. positively homogeneous: ``E(c f) = c E(f)`` for finite ``c > 0``;
3. subadditive: ``E(f + g) <= E(f) + E(g)``;
4. normalized: ``E(c) = c`` for every finite constant ``c``.

A functional satisfying 1..4 is handled at level "outer-content".  The
stronger level "superexpectation" additionally claims countable
subadditivity on nonnegative gambles; that claim is not finitely checkable,
so :func:`check_axioms` exercises a finite surrogate (subadditivity over
finite families of nonnegative gambles and truncated increasing sums) and
says so in the report.

Built-in functionals:

* :class:`Measure`: exact probability weights, priced by the weighted sum.
  A gamble worth ``inf`` on an outcome of positive weight prices at
  ``inf`` even if another coordinate is ``-inf`` (positive infinity
  dominates mixed sums); zero-weight outcomes never contribute, including
  infinite ones.
* :class:`SupContent`: the worst-case price ``max_x f(x)``.
* :class:`Envelope`: upper envelope of finitely many measures.
* :class:`TableContent`: an explicit, finite price list supplied by the
  user, carried as an unverified claim for the audit harness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from gtprob.extreal import ExtReal, INF, NEG_INF, ONE, ZERO, ext, scale

__all__ = [
    "OutcomeSet",
    "Gamble",
    "OuterContent",
    "Measure",
    "SupContent",
    "Envelope",
    "TableContent",
    "ExtendedContent",
    "AxiomReport",
    "check_axioms",
    "extend_bounded_below",
    "GambleSpaceError",
    "UnknownGambleError",
    "OUTER_CONTENT",
    "SUPEREXPECTATION",
]

OUTER_CONTENT = "outer-content"
SUPEREXPECTATION = "superexpectation"


class GambleSpaceError(ValueError):
    """A gamble was evaluated against a functional on a different outcome set."""


class UnknownGambleError(KeyError):
    """A table-backed functional has no entry for the requested gamble."""


class OutcomeSet:
    """Ordered finite set of distinct outcome labels."""

    __slots__ = ("labels", "_index")

    def __init__(self, labels: Iterable[str]):
        labels = tuple(labels)
        if not labels:
            raise ValueError("outcome set must be non-empty")
        if len(set(labels)) != len(labels):
            raise ValueError(f"outcome labels must be distinct: {labels}")
        for lab in labels:
            if not isinstance(lab, str) or not lab:
                raise ValueError(f"outcome labels must be non-empty strings: {lab!r}")
            if "," in lab:
                raise ValueError(f"outcome labels must not contain commas: {lab!r}")
        self.labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise GambleSpaceError(f"unknown outcome {label!r}; labels are {self.labels}")

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def __iter__(self):
        return iter(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        return isinstance(other, OutcomeSet) and self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)

    def __repr__(self) -> str:
        return f"OutcomeSet({list(self.labels)!r})"

    def tuples(self, length: int):
        """All label tuples of the given length, in lexicographic order."""
        return itertools.product(self.labels, repeat=length)


class Gamble:
    """Total map from an outcome set to extended reals."""

    __slots__ = ("outcomes", "values")

    def __init__(self, outcomes: OutcomeSet, values: Sequence[ExtReal]):
        values = tuple(values)
        if len(values) != len(outcomes):
            raise ValueError("gamble must assign a value to every outcome")
        self.outcomes = outcomes
        self.values = values

    @classmethod
    def of(cls, outcomes: OutcomeSet, spec) -> "Gamble":
        """Build from a mapping label->value, a sequence, or a single constant."""
        if isinstance(spec, Mapping):
            missing = [lab for lab in outcomes if lab not in spec]
            if missing:
                raise ValueError(f"gamble is missing outcomes {missing}")
            return cls(outcomes, [ext(spec[lab]) for lab in outcomes])
        if isinstance(spec, (list, tuple)):
            return cls(outcomes, [ext(v) for v in spec])
        return cls.constant(outcomes, spec)

    @classmethod
    def constant(cls, outcomes: OutcomeSet, value) -> "Gamble":
        v = ext(value)
        return cls(outcomes, [v] * len(outcomes))

    def __getitem__(self, label: str) -> ExtReal:
        return self.values[self.outcomes.index(label)]

    def __add__(self, other: "Gamble") -> "Gamble":
        self._same_space(other)
        return Gamble(self.outcomes, [a + b for a, b in zip(self.values, other.values)])

    def __neg__(self) -> "Gamble":
        return Gamble(self.outcomes, [-v for v in self.values])

    def scaled(self, c) -> "Gamble":
        c = Fraction(c)
        return Gamble(self.outcomes, [scale(c, v) for v in self.values])

    def shifted(self, c) -> "Gamble":
        d = ext(c)
        return Gamble(self.outcomes, [v + d for v in self.values])

    def clamped_below(self, floor) -> "Gamble":
        f = ext(floor)
        return Gamble(self.outcomes, [v if v >= f else f for v in self.values])

    def le(self, other: "Gamble") -> bool:
        self._same_space(other)
        return all(a <= b for a, b in zip(self.values, other.values))

    @property
    def is_bounded_below(self) -> bool:
        return all(not v.is_neg_inf for v in self.values)

    @property
    def is_nonnegative(self) -> bool:
        return all(v >= ZERO for v in self.values)

    def _same_space(self, other: "Gamble") -> None:
        if self.outcomes != other.outcomes:
            raise GambleSpaceError("gambles live on different outcome sets")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Gamble)
            and self.outcomes == other.outcomes
            and self.values == other.values
        )

    def __hash__(self) -> int:
        return hash((self.outcomes, self.values))

    def __repr__(self) -> str:
        pairs = ", ".join(f"{lab}: {v}" for lab, v in zip(self.outcomes, self.values))
        return f"Gamble({pairs})"


class OuterContent:
    """Base class for pricing functionals on gambles over one outcome set.

    Subclasses implement :meth:`eval_seq` on a value sequence aligned with
    the outcome order; :meth:`eval` is the public, space-checked entry.
    ``declared_level`` records what the functional claims to be; the claim
    is audited, not trusted (see :func:`check_axioms`).
    """

    declared_level: str = OUTER_CONTENT

    def __init__(self, outcomes: OutcomeSet):
        self.outcomes = outcomes

    def eval(self, f: Gamble) -> ExtReal:
        if f.outcomes != self.outcomes:
            raise GambleSpaceError(
                f"gamble on {f.outcomes.labels} evaluated against a functional on {self.outcomes.labels}"
            )
        return self.eval_seq(f.values)

    def eval_seq(self, values: Sequence[ExtReal]) -> ExtReal:
        raise NotImplementedError

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._key()))

    def _key(self):
        return self.outcomes


class Measure(OuterContent):
    """Linear expectation under exact probability weights."""

    declared_level = SUPEREXPECTATION

    def __init__(self, outcomes: OutcomeSet, probs, *, validate: bool = True):
        super().__init__(outcomes)
        if isinstance(probs, Mapping):
            weights = tuple(Fraction(probs.get(lab, 0)) for lab in outcomes)
        else:
            weights = tuple(Fraction(p) for p in probs)
            if len(weights) != len(outcomes):
                raise ValueError("need one weight per outcome")
        if validate:
            if any(p < 0 for p in weights):
                raise ValueError(f"probabilities must be nonnegative: {weights}")
            if sum(weights) != 1:
                raise ValueError(f"probabilities must sum to exactly 1: {weights}")
        self.probs = weights

    @classmethod
    def uniform(cls, outcomes: OutcomeSet) -> "Measure":
        n = len(outcomes)
        return cls(outcomes, [Fraction(1, n)] * n)

    @classmethod
    def unchecked(cls, outcomes: OutcomeSet, probs) -> "Measure":
        """Skip validation; for auditing deliberately defective weightings."""
        return cls(outcomes, probs, validate=False)

    def eval_seq(self, values: Sequence[ExtReal]) -> ExtReal:
        acc = Fraction(0)
        saw_pos_inf = False
        saw_neg_inf = False
        for p, v in zip(self.probs, values):
            if not p:
                continue
            raw = v._v  # hot loop; the class check sidesteps slow
            if raw.__class__ is float:  # Fraction-vs-float comparisons
                if raw > 0:
                    saw_pos_inf = True
                else:
                    saw_neg_inf = True
            else:
                acc += p * raw
        if saw_pos_inf:
            return INF
        if saw_neg_inf:
            return NEG_INF
        return ExtReal.of(acc)

    def _key(self):
        return (self.outcomes, self.probs)

    def __repr__(self) -> str:
        pairs = ", ".join(f"{lab}: {p}" for lab, p in zip(self.outcomes, self.probs))
        return f"Measure({pairs})"


class SupContent(OuterContent):
    """Worst-case price: the maximum payoff over outcomes."""

    declared_level = SUPEREXPECTATION

    def eval_seq(self, values: Sequence[ExtReal]) -> ExtReal:
        return max(values)

    def __repr__(self) -> str:
        return f"SupContent({list(self.outcomes.labels)!r})"


class Envelope(OuterContent):
    """Upper envelope of a non-empty finite family of measures."""

    declared_level = SUPEREXPECTATION

    def __init__(self, outcomes: OutcomeSet, measures: Sequence[Measure | Mapping | Sequence]):
        super().__init__(outcomes)
        built = []
        for m in measures:
            if isinstance(m, Measure):
                if m.outcomes != outcomes:
                    raise GambleSpaceError("envelope member on a different outcome set")
                built.append(m)
            else:
                built.append(Measure(outcomes, m))
        if not built:
            raise ValueError("envelope needs at least one measure")
        self.measures = tuple(built)

    def eval_seq(self, values: Sequence[ExtReal]) -> ExtReal:
        return max(m.eval_seq(values) for m in self.measures)

    def _key(self):
        return (self.outcomes, tuple(m.probs for m in self.measures))

    def __repr__(self) -> str:
        return f"Envelope({len(self.measures)} measures on {list(self.outcomes.labels)!r})"


class TableContent(OuterContent):
    """Explicit finite price list; gambles outside the table raise.

    The declared level is the supplier's claim.  The audit harness skips
    checks whose operands fall outside the table and counts the skips.
    """

    def __init__(
        self,
        outcomes: OutcomeSet,
        entries: Mapping[Gamble, ExtReal] | Iterable[tuple[Gamble, ExtReal]],
        declared_level: str = OUTER_CONTENT,
    ):
        super().__init__(outcomes)
        items = entries.items() if isinstance(entries, Mapping) else entries
        table: dict[tuple, ExtReal] = {}
        for g, v in items:
            if g.outcomes != outcomes:
                raise GambleSpaceError("table entry on a different outcome set")
            table[g.values] = ext(v)
        self._table = table
        if declared_level not in (OUTER_CONTENT, SUPEREXPECTATION):
            raise ValueError(f"unknown level {declared_level!r}")
        self.declared_level = declared_level

    @classmethod
    def from_rule(
        cls,
        outcomes: OutcomeSet,
        gambles: Iterable[Gamble],
        rule: Callable[[Gamble], ExtReal],
        declared_level: str = OUTER_CONTENT,
    ) -> "TableContent":
        return cls(outcomes, [(g, rule(g)) for g in gambles], declared_level)

    def eval_seq(self, values: Sequence[ExtReal]) -> ExtReal:
        try:
            return self._table[tuple(values)]
        except KeyError:
            raise UnknownGambleError(f"no table entry for gamble values {tuple(map(str, values))}")

    def _key(self):
        return (self.outcomes, tuple(sorted(self._table.items(), key=lambda kv: repr(kv[0]))))


class ExtendedContent(OuterContent):
    """Extension of a bounded-below functional to all gambles.

    Evaluates ``F(max(f, a))`` for a clamp level ``a`` marching down by
    doubling steps below the least finite coordinate.  Two consecutive
    equal values certify the limit for every built-in functional (their
    clamped value is a monotone convex function of the clamp level, so
    equality at two points means constancy further down); sixty-four
    strictly decreasing doublings are taken as divergence to ``-inf``.
    """

    _MAX_DOUBLINGS = 64

    def __init__(self, outcomes: OutcomeSet, partial: Callable[[Gamble], ExtReal]):
        super().__init__(outcomes)
        self._partial = partial

    def eval_seq(self, values: Sequence[ExtReal]) -> ExtReal:
        g = Gamble(self.outcomes, values)
        if g.is_bounded_below:
            return self._partial(g)
        finite = [v.finite for v in values if v.is_finite]
        start = min(finite) if finite else Fraction(0)
        # Integer floor keeps clamp levels simple.
        base = Fraction(start.__floor__())
        prev: ExtReal | None = None
        for k in range(self._MAX_DOUBLINGS + 1):
            level = base - Fraction(2) ** k
            cur = self._partial(g.clamped_below(level))
            if prev is not None:
                if cur == prev:
                    return cur
                if cur > prev:
                    raise ValueError(
                        "partial functional is not monotone in the clamp level; "
                        "it cannot satisfy the monotonicity axiom"
                    )
            prev = cur
        return NEG_INF

    def _key(self):
        return (self.outcomes, id(self._partial))


def extend_bounded_below(
    outcomes: OutcomeSet, partial: Callable[[Gamble], ExtReal] | OuterContent
) -> ExtendedContent:
    """Extend a functional defined on bounded-below gambles to all gambles.

    ``partial`` must satisfy axioms 1..4 on its domain.  The extension
    prices ``f`` as the limit of ``partial(max(f, a))`` as the clamp level
    ``a`` decreases; on a finite outcome set the clamp is inactive except
    on ``-inf`` coordinates once ``a`` is below the least finite value.
    """
    fn = partial.eval if isinstance(partial, OuterContent) else partial
    return ExtendedContent(outcomes, fn)


# -- axiom audit -------------------------------------------------------

GRID_VALUES = (NEG_INF, ext(-1), ZERO, ext("1/2"), ONE, ext(2), INF)
SMALL_GRID_VALUES = (NEG_INF, ZERO, ONE, INF)
AUDIT_SCALARS = (Fraction(1, 2), Fraction(2), Fraction(3))
AUDIT_CONSTANTS = (Fraction(-1), Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))


def default_grid(outcomes: OutcomeSet) -> list[Gamble]:
    """Deterministic exhaustive gamble grid used when no suite is supplied."""
    values = GRID_VALUES if len(outcomes) <= 3 else SMALL_GRID_VALUES
    return [
        Gamble(outcomes, combo)
        for combo in itertools.product(values, repeat=len(outcomes))
    ]


@dataclass
class AxiomResult:
    name: str
    passed: bool
    checked: int
    skipped: int = 0
    witness: str | None = None

    def __str__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        extra = f" [{self.witness}]" if self.witness else ""
        skip = f", {self.skipped} skipped" if self.skipped else ""
        return f"{self.name}: {status} ({self.checked} checks{skip}){extra}"


@dataclass
class AxiomReport:
    results: dict[str, AxiomResult] = field(default_factory=dict)
    level_claimed: str = OUTER_CONTENT
    level_audited: str = OUTER_CONTENT

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def __str__(self) -> str:
        lines = [str(r) for r in self.results.values()]
        lines.append(f"claimed level: {self.level_claimed}; audited level: {self.level_audited}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "results": {
                k: {
                    "passed": r.passed,
                    "checked": r.checked,
                    "skipped": r.skipped,
                    "witness": r.witness,
                }
                for k, r in sorted(self.results.items())
            },
            "level_claimed": self.level_claimed,
            "level_audited": self.level_audited,
        }


def _gamble_str(g: Gamble) -> str:
    return "(" + ", ".join(str(v) for v in g.values) + ")"


def check_axioms(
    content: OuterContent,
    gambles: Sequence[Gamble] | None = None,
    scalars: Sequence[Fraction] = AUDIT_SCALARS,
) -> AxiomReport:
    """Audit a functional against the four axioms plus the finite surrogate
    of countable subadditivity.

    When ``gambles`` is omitted a deterministic exhaustive grid over small
    values (including both infinities) is used.  Table-backed functionals
    skip checks whose operands fall outside the table; skips are counted in
    the report.  The report never trusts ``declared_level``: the audited
    level is downgraded if the surrogate of the stronger axiom fails.
    """
    suite = list(gambles) if gambles is not None else default_grid(content.outcomes)
    if not suite:
        raise ValueError("audit suite must be non-empty")

    cache: dict[tuple, ExtReal | None] = {}

    def price(g: Gamble) -> ExtReal | None:
        key = g.values
        if key not in cache:
            try:
                cache[key] = content.eval(g)
            except UnknownGambleError:
                cache[key] = None
        return cache[key]

    report = AxiomReport(level_claimed=content.declared_level)

    # Axiom 1: monotone.
    checked = skipped = 0
    witness = None
    for f, g in itertools.combinations_with_replacement(suite, 2):
        for lo, hi in ((f, g), (g, f)):
            if not lo.le(hi):
                continue
            a, b = price(lo), price(hi)
            if a is None or b is None:
                skipped += 1
                continue
            checked += 1
            if not (a <= b) and witness is None:
                witness = f"f={_gamble_str(lo)} <= g={_gamble_str(hi)} but E(f)={a} > E(g)={b}"
    report.results["monotone"] = AxiomResult("monotone", witness is None, checked, skipped, witness)

    # Axiom 2: positive homogeneity.
    checked = skipped = 0
    witness = None
    for f in suite:
        ef = price(f)
        if ef is None:
            skipped += len(scalars)
            continue
        for c in scalars:
            cf = price(f.scaled(c))
            if cf is None:
                skipped += 1
                continue
            checked += 1
            if cf != scale(c, ef) and witness is None:
                witness = f"E({c}*{_gamble_str(f)})={cf} but {c}*E(f)={scale(c, ef)}"
    report.results["homogeneous"] = AxiomResult(
        "homogeneous", witness is None, checked, skipped, witness
    )

    # Axiom 3: subadditive.
    checked = skipped = 0
    witness = None
    for f, g in itertools.product(suite, repeat=2):
        ef, eg = price(f), price(g)
        s = price(f + g)
        if ef is None or eg is None or s is None:
            skipped += 1
            continue
        checked += 1
        if not (s <= ef + eg) and witness is None:
            witness = (
                f"f={_gamble_str(f)}, g={_gamble_str(g)}: "
                f"E(f+g)={s} > E(f)+E(g)={ef + eg}"
            )
    report.results["subadditive"] = AxiomResult(
        "subadditive", witness is None, checked, skipped, witness
    )

    # Axiom 4: normalized on finite constants.
    checked = skipped = 0
    witness = None
    for c in AUDIT_CONSTANTS:
        v = price(Gamble.constant(content.outcomes, c))
        if v is None:
            skipped += 1
            continue
        checked += 1
        if v != ext(c) and witness is None:
            witness = f"E({c})={v} != {c}"
    report.results["normalized"] = AxiomResult(
        "normalized", witness is None, checked, skipped, witness
    )

    # Finite surrogate of countable subadditivity on nonnegative gambles:
    # finite families and truncated increasing partial sums.  The countable
    # form itself is not finitely checkable.
    checked = skipped = 0
    witness = None
    nonneg = [f for f in suite if f.is_nonnegative]
    triples = list(itertools.islice(itertools.combinations(nonneg, 3), 400))
    for family in triples:
        total = family[0] + family[1] + family[2]
        parts = [price(f) for f in family]
        whole = price(total)
        if whole is None or any(p is None for p in parts):
            skipped += 1
            continue
        rhs = parts[0] + parts[1] + parts[2]
        checked += 1
        if not (whole <= rhs) and witness is None:
            witness = (
                "family "
                + ", ".join(_gamble_str(f) for f in family)
                + f": E(sum)={whole} > sum E={rhs}"
            )
    for f in nonneg[:50]:
        run = f
        run_price = price(f)
        for k in (2, 3):
            run = run + f
            cur = price(run)
            ef = price(f)
            if cur is None or ef is None or run_price is None:
                skipped += 1
                continue
            run_price = run_price + ef
            checked += 1
            if not (cur <= run_price) and witness is None:
                witness = f"partial sum of {k} copies of {_gamble_str(f)}: E={cur} > {run_price}"
    report.results["countable-subadditive (finite surrogate)"] = AxiomResult(
        "countable-subadditive (finite surrogate)", witness is None, checked, skipped, witness
    )

    core_ok = all(
        report.results[k].passed for k in ("monotone", "homogeneous", "subadditive", "normalized")
    )
    surrogate_ok = report.results["countable-subadditive (finite surrogate)"].passed
    if not core_ok:
        report.level_audited = "not-an-outer-content"
    elif surrogate_ok and content.declared_level == SUPEREXPECTATION:
        report.level_audited = SUPEREXPECTATION
    else:
        report.level_audited = OUTER_CONTENT
    return report
