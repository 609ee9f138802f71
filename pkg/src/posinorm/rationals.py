"""Exact rational scalar helpers shared across the package.

The working scalar is gmpy2.mpq when available (GMP gcds keep bigint families
like the Fibonacci matrix fast at index 10^4), with fractions.Fraction as a
drop-in fallback.  The two interoperate freely; public formatting always goes
through numerator/denominator.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction

try:
    from gmpy2 import mpq as RAT
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    RAT = Fraction


def parse_rational(value):
    """Parse an exact rational from a "p/q" (or integer/decimal) string.

    Binary floats are rejected: the exact backend must never absorb a value
    that was already rounded.
    """
    if isinstance(value, (Fraction, numbers.Rational)) or type(value) is type(RAT(0)):
        return RAT(value)
    if isinstance(value, int):
        return RAT(value)
    if isinstance(value, float):
        raise ValueError(
            "refusing a binary float %r; pass an exact string such as '3/4'" % (value,)
        )
    text = str(value).strip()
    try:
        return RAT(text)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return RAT(Fraction(text))  # Fraction also accepts decimal spellings
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError("not an exact rational: %r" % (value,)) from exc


def format_rational(x) -> str:
    """Canonical lowest-terms serialization: "p" for integers, else "p/q"."""
    x = RAT(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def exact_sqrt(x):
    """Return the exact rational square root of x, or None if irrational."""
    x = RAT(x)
    if x < 0:
        raise ValueError("negative value has no real square root")
    num = math.isqrt(x.numerator)
    den = math.isqrt(x.denominator)
    if num * num == x.numerator and den * den == x.denominator:
        return RAT(num, den)
    return None


def parse_int(value) -> int:
    """Parse an integer parameter, accepting exact rational spellings of one."""
    r = parse_rational(value)
    if r.denominator != 1:
        raise ValueError("expected an integer, got %s" % format_rational(r))
    return r.numerator
