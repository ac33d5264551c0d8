"""Exact scalars with a p-adic valuation.

Elements of the fraction field F of the valuation ring V are modelled by
:class:`fractions.Fraction`; the uniformiser is the prime ``p`` passed to each
call, so several primes can be used in one process.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Scalar = Fraction
Valuation = Union[int, float]

INF = math.inf


def as_scalar(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_rational(x)
    return Fraction(x)


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"``, ``"-3"`` or ``"0.25"`` into an exact rational."""
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {text!r}") from None


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _int_valuation(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def check_prime(p: int) -> int:
    if not isinstance(p, int) or p < 2:
        raise ValueError(f"not a prime: {p!r}")
    if any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
        raise ValueError(f"not a prime: {p!r}")
    return p


def valuation(x, p: int) -> Valuation:
    """Exponent of ``p`` in ``x``; ``math.inf`` for zero."""
    x = as_scalar(x)
    if x == 0:
        return INF
    return _int_valuation(abs(x.numerator), p) - _int_valuation(x.denominator, p)


def is_unit(x, p: int) -> bool:
    """True iff ``|x| = 1``, i.e. ``valuation(x, p) == 0``."""
    return valuation(x, p) == 0


def in_ring(x, p: int) -> bool:
    """Membership in V: denominator coprime to ``p``."""
    return valuation(x, p) >= 0


def is_root_of_unity(x) -> bool:
    # over Q the only roots of unity are +1 and -1
    return as_scalar(x) in (1, -1)
