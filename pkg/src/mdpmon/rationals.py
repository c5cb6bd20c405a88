"""Exact rational arithmetic helpers.

All probabilities and risks in this package are `fractions.Fraction`
values; nothing is ever routed through binary floats.  The alias `Q` is
the single switch point should a faster exact rational type ever be
needed.
"""

from __future__ import annotations

from decimal import Decimal, getcontext
from fractions import Fraction

Q = Fraction

ZERO = Q(0)
ONE = Q(1)


def parse_rational(text: str) -> Fraction:
    """Parse ``3/4``, ``0.75`` or ``1`` into an exact Fraction.

    Decimal literals are converted exactly (``0.75`` -> 3/4); scientific
    notation and other float syntax are rejected so that no value can
    silently pass through a binary float.
    """
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        return Q(int(num), int(den))
    if "." in text:
        whole, _, frac = text.partition(".")
        if not frac or any(c not in "0123456789" for c in frac):
            raise ValueError(f"not a rational literal: {text!r}")
        sign = -1 if whole.strip().startswith("-") else 1
        whole_i = int(whole) if whole not in ("", "-", "+") else 0
        return Q(whole_i) + sign * Q(int(frac), 10 ** len(frac))
    return Q(int(text))


def format_rational(value: Fraction) -> str:
    """Lossless text form, ``13/20`` or ``1`` for integers."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Fraction, digits: int = 12) -> str:
    """Round-to-nearest decimal rendering with `digits` significant digits."""
    ctx = getcontext().copy()
    ctx.prec = digits
    d = ctx.divide(Decimal(value.numerator), Decimal(value.denominator))
    return format(d, "f")
