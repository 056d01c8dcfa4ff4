"""Finite measure spaces, function classes and the projection operator."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from ._num import all_exact, is_exact
from .errors import PartitionError, SpaceMismatch, ZeroMass


@dataclass(frozen=True)
class AtomSpace:
    """Finite set of atoms with power-set sigma-algebra.

    The order of ``atoms`` is canonical: iteration and tie-breaks follow it.
    """

    atoms: tuple

    def __post_init__(self):
        atoms = tuple(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("an atom space needs at least one atom")
        if len(set(atoms)) != len(atoms):
            raise ValueError("atom identifiers must be unique")

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __contains__(self, x):
        return x in self.atoms

    def index(self, x) -> int:
        return self.atoms.index(x)

    def sort(self, atoms) -> tuple:
        atoms = set(atoms)
        return tuple(a for a in self.atoms if a in atoms)


@dataclass(frozen=True, eq=False)
class Measure:
    space: AtomSpace
    mass: Mapping

    def __post_init__(self):
        mass = dict(self.mass)
        missing = [a for a in self.space if a not in mass]
        extra = [a for a in mass if a not in self.space]
        if missing or extra:
            raise SpaceMismatch(f"mass entries do not match atoms: missing={missing} extra={extra}")
        if any(m < 0 for m in mass.values()):
            raise ValueError("masses must be nonnegative")
        object.__setattr__(self, "mass", {a: mass[a] for a in self.space})

    @classmethod
    def from_masses(cls, masses: Mapping) -> "Measure":
        return cls(AtomSpace(tuple(masses)), masses)

    def __eq__(self, other):
        return isinstance(other, Measure) and self.space == other.space and self.mass == other.mass

    def __hash__(self):
        return hash((self.space, tuple(self.mass.items())))

    @property
    def positive(self) -> tuple:
        return tuple(a for a in self.space if self.mass[a] > 0)

    @property
    def null(self) -> tuple:
        return tuple(a for a in self.space if self.mass[a] == 0)

    @property
    def total(self):
        return _sum(self.mass.values())

    def of(self, atoms) -> object:
        return _sum(self.mass[a] for a in atoms)

    def restrict(self, atoms) -> "Measure":
        """chi_A * m on the same space."""
        atoms = set(atoms)
        zero = Fraction(0)
        return Measure(self.space, {a: (m if a in atoms else zero * m) for a, m in self.mass.items()})

    def normalized_mass(self, atoms):
        total = self.total
        if total == 0:
            raise ZeroMass("measure has zero total mass")
        return self.of(atoms) / total


def _sum(values):
    values = list(values)
    if all_exact(values):
        return sum(values, Fraction(0))
    return sum(float(v) for v in values)


@dataclass(frozen=True, eq=False)
class TotalFunction:
    """Everywhere-defined bounded function, including on null atoms."""

    values: Mapping

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))

    def __getitem__(self, x):
        return self.values[x]

    def __eq__(self, other):
        return isinstance(other, TotalFunction) and self.values == other.values

    def sup(self):
        return max(abs(v) for v in self.values.values())


@dataclass(frozen=True, eq=False)
class FunctionClass:
    """m-a.e. class of a function: values on positive atoms only."""

    values: Mapping

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))

    @classmethod
    def constant(cls, c, m: Measure) -> "FunctionClass":
        return cls({a: c for a in m.positive})

    @classmethod
    def indicator(cls, atoms, m: Measure) -> "FunctionClass":
        atoms = set(atoms)
        return cls({a: Fraction(int(a in atoms)) for a in m.positive})

    def __getitem__(self, x):
        return self.values[x]

    def __iter__(self):
        return iter(self.values)

    def keys(self):
        return self.values.keys()

    def _check(self, other):
        if self.values.keys() != other.values.keys():
            raise SpaceMismatch("function classes live on different positive sets")

    def __eq__(self, other):
        return isinstance(other, FunctionClass) and self.values == other.values

    def __add__(self, other):
        if isinstance(other, FunctionClass):
            self._check(other)
            return FunctionClass({a: v + other.values[a] for a, v in self.values.items()})
        return FunctionClass({a: v + other for a, v in self.values.items()})

    __radd__ = __add__

    def __neg__(self):
        return FunctionClass({a: -v for a, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FunctionClass):
            self._check(other)
            return FunctionClass({a: v * other.values[a] for a, v in self.values.items()})
        return FunctionClass({a: v * other for a, v in self.values.items()})

    __rmul__ = __mul__

    def __abs__(self):
        return FunctionClass({a: abs(v) for a, v in self.values.items()})

    def ess_sup(self):
        return max((abs(v) for v in self.values.values()), default=0)

    def allclose(self, other, tol=1e-12) -> bool:
        self._check(other)
        return all(abs(v - other.values[a]) <= tol for a, v in self.values.items())


@dataclass(frozen=True, eq=False)
class PointMap:
    source: AtomSpace
    target: AtomSpace
    assignment: Mapping

    def __post_init__(self):
        assign = dict(self.assignment)
        if set(assign) != set(self.source.atoms):
            raise SpaceMismatch("point map must be total on the source atoms")
        bad = [y for y in assign.values() if y not in self.target]
        if bad:
            raise SpaceMismatch(f"point map hits unknown target atoms {bad}")
        object.__setattr__(self, "assignment", {a: assign[a] for a in self.source})

    def __call__(self, x):
        return self.assignment[x]

    def fiber(self, y) -> tuple:
        return tuple(x for x in self.source if self.assignment[x] == y)

    @classmethod
    def identity(cls, space: AtomSpace) -> "PointMap":
        return cls(space, space, {a: a for a in space})


@dataclass(frozen=True, eq=False)
class Disintegration:
    """Conditional probabilities m_X^y for every positive atom y of the base."""

    base: Measure
    family: Mapping

    def integrate(self, f: Mapping, y):
        return _sum(f[x] * p for x, p in self.family[y].items() if p != 0)


def project_class(f: TotalFunction, m: Measure) -> FunctionClass:
    """Restrict an everywhere-defined function to the positive atoms of ``m``."""
    if set(f.values) != set(m.space.atoms):
        raise SpaceMismatch("function is not defined on the measure's atom space")
    return FunctionClass({a: f.values[a] for a in m.positive})


def _check_class(f: FunctionClass, m: Measure):
    if set(f.values) != set(m.positive):
        raise SpaceMismatch("function class is not defined on the positive atoms of the measure")


def l0_distance(f: FunctionClass, g: FunctionClass, m: Measure):
    """int |f-g| ^ 1 dm' with m' the normalization of m."""
    _check_class(f, m)
    _check_class(g, m)
    total = m.total
    if total == 0:
        raise ZeroMass("l0 distance needs positive total mass")
    one = 1 if all_exact(f.values.values()) and all_exact(g.values.values()) else 1.0
    return _sum(min(abs(f[a] - g[a]), one) * m.mass[a] for a in m.positive) / total


def measure_algebra_distance(a, b, m: Measure):
    """Normalized mass of the symmetric difference."""
    a, b = set(a), set(b)
    if not (a | b) <= set(m.space.atoms):
        raise SpaceMismatch("sets must consist of atoms of the space")
    return m.normalized_mass(a ^ b)


def pushforward(phi: PointMap, m: Measure) -> Measure:
    if phi.source != m.space:
        raise SpaceMismatch("map source differs from the measure's space")
    zero = Fraction(0) if all_exact(m.mass.values()) else 0.0
    out = {y: zero for y in phi.target}
    for x, mx in m.mass.items():
        out[phi(x)] = out[phi(x)] + mx
    return Measure(phi.target, out)


def disintegrate(phi: PointMap, m_x: Measure) -> Disintegration:
    base = pushforward(phi, m_x)
    family = {}
    for y in base.positive:
        fib = set(phi.fiber(y))
        family[y] = {x: (m_x.mass[x] / base.mass[y] if x in fib else 0 * m_x.mass[x]) for x in m_x.space}
    return Disintegration(base, family)


def _extend_by_zero(f: FunctionClass, m: Measure) -> dict:
    return {a: (f.values[a] if a in f.values else 0) for a in m.space}


def pr_phi_function(f: FunctionClass, phi: PointMap, m_x: Measure) -> FunctionClass:
    """Projection operator: average of ``f`` against the disintegration of ``m_x``."""
    _check_class(f, m_x)
    dis = disintegrate(phi, m_x)
    full = _extend_by_zero(f, m_x)
    return FunctionClass({y: dis.integrate(full, y) for y in dis.base.positive})


def pr_phi_radon_nikodym(f: FunctionClass, phi: PointMap, m_x: Measure) -> FunctionClass:
    """Projection operator via d phi_*(f^+ m) / dm_Y - d phi_*(f^- m) / dm_Y.

    Independent of :func:`disintegrate`; used to cross-check it.
    """
    _check_class(f, m_x)
    m_y = pushforward(phi, m_x)
    plus = {x: (max(f.values[x], 0) * m_x.mass[x] if x in f.values else 0) for x in m_x.space}
    minus = {x: (max(-f.values[x], 0) * m_x.mass[x] if x in f.values else 0) for x in m_x.space}
    mu_plus = pushforward(phi, Measure(m_x.space, plus))
    mu_minus = pushforward(phi, Measure(m_x.space, minus))
    return FunctionClass(
        {y: mu_plus.mass[y] / m_y.mass[y] - mu_minus.mass[y] / m_y.mass[y] for y in m_y.positive}
    )


def compose_class(g: FunctionClass, phi: PointMap, m_x: Measure) -> FunctionClass:
    """g o phi as a class over ``m_x``; needs phi_* m_x << m_Y."""
    out = {}
    for x in m_x.positive:
        y = phi(x)
        if y not in g.values:
            raise SpaceMismatch(f"positive atom {x!r} is sent to {y!r} where g is undefined")
        out[x] = g.values[y]
    return FunctionClass(out)


def glue_functions(partition, parts, m: Measure) -> FunctionClass:
    """Splice ``parts[i]`` on block ``partition[i]``."""
    if len(partition) != len(parts):
        raise PartitionError("partition and parts have different lengths")
    blocks = [set(b) for b in partition]
    seen = set()
    for b in blocks:
        if seen & b:
            raise PartitionError("partition blocks overlap")
        seen |= b
    pos = set(m.positive)
    if not pos <= seen:
        raise PartitionError(f"partition misses positive atoms {sorted(pos - seen, key=m.space.index)}")
    out = {}
    for block, part in zip(blocks, parts):
        for a in block & pos:
            out[a] = part.values[a]
    return FunctionClass({a: out[a] for a in m.positive})


__all__ = [
    "AtomSpace", "Measure", "TotalFunction", "FunctionClass", "PointMap", "Disintegration",
    "project_class", "l0_distance", "measure_algebra_distance", "pushforward", "disintegrate",
    "pr_phi_function", "pr_phi_radon_nikodym", "compose_class", "glue_functions", "is_exact",
]
