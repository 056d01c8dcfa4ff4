"""Number handling: exact rationals where possible, doubles otherwise."""
from __future__ import annotations

import math
import os
from fractions import Fraction
from numbers import Rational

DEFAULT_TOL = float(os.environ.get("FIBERLIB_TOL", "1e-12"))


def is_exact(x) -> bool:
    return isinstance(x, Rational)


def all_exact(values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def parse_number(x):
    """Parse a JSON number or an exact string such as ``"3/4"``."""
    if isinstance(x, bool):
        raise ValueError(f"not a number: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        s = x.strip()
        if s in ("inf", "+inf", "Infinity"):
            return math.inf
        try:
            return Fraction(s)
        except ValueError:
            return float(s)
    raise ValueError(f"not a number: {x!r}")


def dump_number(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def root(x, p):
    """p-th root of a nonnegative number; exact when it can be kept exact."""
    if p == 1:
        return x
    if x == 0:
        return Fraction(0) if is_exact(x) else 0.0
    if is_exact(x) and isinstance(p, int):
        x = Fraction(x)
        a, b = _int_root(x.numerator, p), _int_root(x.denominator, p)
        if a is not None and b is not None:
            return Fraction(a, b)
    if p == 2:
        return math.sqrt(x)
    return float(x) ** (1.0 / p)


def _int_root(n, p):
    """Exact integer p-th root of n >= 0, or None."""
    if p == 2:
        r = math.isqrt(n)
        return r if r * r == n else None
    try:
        guess = round(n ** (1.0 / p))
    except OverflowError:
        return None
    for r in (guess - 1, guess, guess + 1):
        if r >= 0 and r ** p == n:
            return r
    return None


def dot(u, v):
    """Inner product; exact on rationals, correctly rounded on floats."""
    if all_exact(u) and all_exact(v):
        return sum((a * b for a, b in zip(u, v)), Fraction(0))
    return math.fsum(a * b for a, b in zip(u, v))


def sign(x):
    return (x > 0) - (x < 0)
