"""Truncations of the divergence example for Pr_phi on L^0.

X = {1, ..., n, rest} with m(i) = 2^-i and m(rest) = 2^-n, so m(X) = 1; Y is
a single point.  f_n = sum_{i <= n} 2^i chi_i has Pr_phi(f_n) = n, so no
L^0-continuous extension of Pr_phi exists.
"""
from __future__ import annotations

from fractions import Fraction

from .measure import AtomSpace, FunctionClass, Measure, PointMap, pr_phi_function

REST = "rest"
POINT = "0"


def divergence_instance(n: int, truncation: int | None = None):
    """(m_X, phi, f_n) on the space truncated after ``truncation`` atoms (default n)."""
    t = n if truncation is None else truncation
    if not 1 <= n <= t:
        raise ValueError("need 1 <= n <= truncation")
    atoms = tuple(str(i) for i in range(1, t + 1)) + (REST,)
    mass = {str(i): Fraction(1, 2 ** i) for i in range(1, t + 1)}
    mass[REST] = Fraction(1, 2 ** t)
    m = Measure(AtomSpace(atoms), mass)
    phi = PointMap(m.space, AtomSpace((POINT,)), {a: POINT for a in atoms})
    f = FunctionClass({a: (Fraction(2 ** int(a)) if a != REST and int(a) <= n else Fraction(0)) for a in atoms})
    return m, phi, f


def divergence_value(n: int, truncation: int | None = None) -> Fraction:
    m, phi, f = divergence_instance(n, truncation)
    return pr_phi_function(f, phi, m).values[POINT]
