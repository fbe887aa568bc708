"""Exact extended-real arithmetic.

A value is either an exact rational (:class:`fractions.Fraction`) or one of
the two infinities.  Two conventions make the operations the package needs
total:

* ``inf + (-inf) = inf``: a positive infinity dominates any sum, and
* ``0 * x = 0`` for every ``x``, including the infinities.

Under these conventions addition is commutative and associative on the
whole domain, so multi-term sums are well defined regardless of
bracketing.  Subtraction is sugar for adding a negation, hence
``inf - inf = inf``.

Multiplication is deliberately narrow: only :func:`scale` by a finite
nonnegative rational is provided, because that is the only product the
rest of the package uses (convex weights and positive scaling).  Negation
is a separate total operation with ``-(inf) = -inf``.

The order is total: ``-inf`` below every rational, ``inf`` above.  Nothing
here rounds, and there is no floating-point mode.

Serialized form: ``"p/q"`` in lowest terms (plain ``"p"`` when q is 1),
``"inf"``, ``"-inf"``.  :func:`ext` parses it back bit-exactly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

__all__ = ["ExtReal", "ext", "scale", "INF", "NEG_INF", "ZERO", "ONE"]

_PInf = float("inf")
_NInf = float("-inf")

ExtRealLike = Union["ExtReal", Fraction, int, str]


class ExtReal:
    """An exact rational or one of the symbols ``inf`` / ``-inf``."""

    __slots__ = ("_v",)

    def __init__(self, value: Fraction | float):
        # Internal: use ExtReal.of / ext() to construct from user input.
        self._v = value

    # -- construction -------------------------------------------------

    @classmethod
    def of(cls, x: ExtRealLike) -> "ExtReal":
        """Coerce an int, Fraction, or serialized string to an ExtReal."""
        if isinstance(x, ExtReal):
            return x
        if isinstance(x, bool):
            raise TypeError("bool is not a valid extended real")
        if isinstance(x, (int, Fraction)):
            return cls(Fraction(x))
        if isinstance(x, str):
            s = x.strip()
            if s == "inf":
                return INF
            if s == "-inf":
                return NEG_INF
            return cls(Fraction(s))
        if isinstance(x, float):
            if x == _PInf:
                return INF
            if x == _NInf:
                return NEG_INF
            raise TypeError(
                "finite floats are rejected to keep arithmetic exact; pass a Fraction or string"
            )
        raise TypeError(f"cannot interpret {x!r} as an extended real")

    # -- predicates and access ----------------------------------------

    @property
    def is_finite(self) -> bool:
        return self._v.__class__ is not float

    @property
    def is_pos_inf(self) -> bool:
        v = self._v
        return v.__class__ is float and v > 0

    @property
    def is_neg_inf(self) -> bool:
        v = self._v
        return v.__class__ is float and v < 0

    @property
    def finite(self) -> Fraction:
        """The underlying rational; raises on the infinities."""
        if not isinstance(self._v, Fraction):
            raise ValueError(f"{self} is not finite")
        return self._v

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "ExtReal") -> "ExtReal":
        if not isinstance(other, ExtReal):
            return NotImplemented
        a, b = self._v, other._v
        # Positive infinity dominates; this includes inf + (-inf) = inf.
        # Type checks first: comparing Fraction against a float infinity
        # takes CPython's slow cross-type path.
        if a.__class__ is float or b.__class__ is float:
            if (a.__class__ is float and a > 0) or (b.__class__ is float and b > 0):
                return INF
            return NEG_INF
        return ExtReal(a + b)

    def __neg__(self) -> "ExtReal":
        v = self._v
        if v == _PInf:
            return NEG_INF
        if v == _NInf:
            return INF
        return ExtReal(-v)

    def __sub__(self, other: "ExtReal") -> "ExtReal":
        if not isinstance(other, ExtReal):
            return NotImplemented
        return self + (-other)

    # -- order ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExtReal):
            return NotImplemented
        return self._v == other._v

    def __hash__(self) -> int:
        return hash(self._v)

    def __lt__(self, other: "ExtReal") -> bool:
        if not isinstance(other, ExtReal):
            return NotImplemented
        return self._v < other._v

    def __le__(self, other: "ExtReal") -> bool:
        if not isinstance(other, ExtReal):
            return NotImplemented
        return self._v <= other._v

    def __gt__(self, other: "ExtReal") -> bool:
        if not isinstance(other, ExtReal):
            return NotImplemented
        return self._v > other._v

    def __ge__(self, other: "ExtReal") -> bool:
        if not isinstance(other, ExtReal):
            return NotImplemented
        return self._v >= other._v

    # -- formatting ------------------------------------------------------

    def __str__(self) -> str:
        if self._v == _PInf:
            return "inf"
        if self._v == _NInf:
            return "-inf"
        return str(self._v)

    def __repr__(self) -> str:
        return f"ExtReal({str(self)!r})"


def ext(x: ExtRealLike) -> ExtReal:
    """Shorthand for :meth:`ExtReal.of`."""
    return ExtReal.of(x)


def scale(c: Fraction | int, a: ExtReal) -> ExtReal:
    """``c * a`` for a finite rational ``c >= 0``.

    ``0 * a = 0`` for every ``a`` including the infinities; positive ``c``
    preserves infinities.  Negative or infinite multipliers are not part of
    the arithmetic and raise.
    """
    c = Fraction(c)
    if c < 0:
        raise ValueError("scale only accepts nonnegative finite multipliers")
    if c == 0:
        return ZERO
    if a.is_pos_inf:
        return INF
    if a.is_neg_inf:
        return NEG_INF
    return ExtReal(c * a.finite)


INF = ExtReal(_PInf)
NEG_INF = ExtReal(_NInf)
ZERO = ExtReal(Fraction(0))
ONE = ExtReal(Fraction(1))
