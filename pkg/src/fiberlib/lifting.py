"""Liftings on atomic measure spaces.

A lifting is fixed by sending every null atom to a positive atom (the
reroute map).  Sets, functions and module elements are then lifted by
evaluating at the rerouted atom, which gives everywhere-defined
representatives compatible with a.e. equality.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from . import linalg
from ._num import dot
from .errors import SpaceMismatch, ZeroMass
from .measure import FunctionClass, Measure, TotalFunction
from .modules import ModuleElement, ModulePresentation
from .norms import contraction_check, dual_norm


@dataclass(frozen=True, eq=False)
class MeasureLifting:
    measure: Measure
    reroute: Mapping

    def __post_init__(self):
        m = self.measure
        if not m.positive:
            raise ZeroMass("a lifting needs a measure with a positive atom")
        reroute = dict(self.reroute)
        if set(reroute) != set(m.null):
            raise SpaceMismatch("reroute must be defined exactly on the null atoms")
        bad = [x for x, y in reroute.items() if y not in m.positive]
        if bad:
            raise SpaceMismatch(f"null atoms {bad} are not rerouted to positive atoms")
        object.__setattr__(self, "reroute", {x: reroute[x] for x in m.null})

    def sigma(self, x):
        """Total reroute map: identity on positive atoms."""
        return self.reroute.get(x, x)


def make_lifting(m: Measure, reroute: Mapping | None = None) -> MeasureLifting:
    """Default policy sends each null atom to the first positive atom."""
    if not m.positive:
        raise ZeroMass("measure is identically zero; no lifting exists")
    if reroute is None:
        first = m.positive[0]
        reroute = {x: first for x in m.null}
    return MeasureLifting(m, reroute)


def lift_set(L: MeasureLifting, atoms) -> tuple:
    """sigma^-1(A intersected with the positive atoms)."""
    pos = set(atoms) & set(L.measure.positive)
    return tuple(x for x in L.measure.space if L.sigma(x) in pos)


def lift_function(L: MeasureLifting, f: FunctionClass) -> TotalFunction:
    if set(f.values) != set(L.measure.positive):
        raise SpaceMismatch("function class is not over the lifting's measure")
    return TotalFunction({x: f.values[L.sigma(x)] for x in L.measure.space})


@dataclass(frozen=True, eq=False)
class LiftedElement:
    """Total per-atom vector in the lifted fibers."""

    values: Mapping

    def __post_init__(self):
        object.__setattr__(self, "values", {x: tuple(v) for x, v in self.values.items()})

    def __getitem__(self, x):
        return self.values[x]

    def __add__(self, other):
        return LiftedElement({x: tuple(a + b for a, b in zip(v, other.values[x])) for x, v in self.values.items()})

    def scale(self, f: TotalFunction):
        return LiftedElement({x: tuple(f.values[x] * a for a in v) for x, v in self.values.items()})


@dataclass(frozen=True, eq=False)
class LiftedModule:
    base: ModulePresentation
    lifting: MeasureLifting

    def fiber_at(self, x):
        """(seminorm, quotient projector) of the fiber over x."""
        y = self.lifting.sigma(x)
        f = self.base.fibers[y]
        return f, _projector(f)

    def lift(self, v: ModuleElement) -> LiftedElement:
        self.base.check(v)
        out = {}
        for x in self.lifting.measure.space:
            y = self.lifting.sigma(x)
            out[x] = linalg.matvec(_projector(self.base.fibers[y]), v.at(y))
        return LiftedElement(out)

    def norm(self, vbar: LiftedElement) -> TotalFunction:
        return TotalFunction({x: self.fiber_at(x)[0].norm(vbar[x]) for x in self.lifting.measure.space})

    def contains(self, vbar: LiftedElement, tol=1e-12) -> bool:
        for x, v in vbar.values.items():
            p = self.fiber_at(x)[1]
            if any(abs(a - b) > tol for a, b in zip(linalg.matvec(p, v), v)):
                return False
        return True


_PROJ_CACHE: dict = {}


def _projector(f):
    key = id(f)
    hit = _PROJ_CACHE.get(key)
    if hit is not None and hit[0] is f:
        return hit[1]
    p = f.quotient_projector()
    _PROJ_CACHE[key] = (f, p)
    return p


def lift_module(L: MeasureLifting, M: ModulePresentation) -> LiftedModule:
    if M.measure != L.measure:
        raise SpaceMismatch("presentation and lifting use different measures")
    return LiftedModule(M, L)


def project_Pi_m(lifted: LiftedModule, vbar: LiftedElement) -> ModuleElement:
    """Forget the values on null atoms."""
    return lifted.base.element({x: vbar[x] for x in lifted.base.atoms})


def lift_pairing(lifted_dual: LiftedModule, omega_bar: LiftedElement, vbar: LiftedElement) -> TotalFunction:
    """<omega_bar, vbar>(x), atom by atom."""
    if lifted_dual.lifting.measure.space.atoms != tuple(vbar.values):
        raise SpaceMismatch("lifted elements live over different spaces")
    return TotalFunction({x: dot(omega_bar[x], vbar[x]) for x in vbar.values})


@dataclass(frozen=True)
class RxReport:
    atom: object
    max_defect: float
    checked: int
    ok: bool


def rx_isometry_check(lifted_dual: LiftedModule, lifted_primal: LiftedModule, x, functionals=None,
                      tol=1e-9) -> RxReport:
    """Compare the operator norm of <omega, .>_x on the primal fiber with |omega|_x.

    The operator norm goes through the primal fiber's dual norm; the dual
    fiber's own seminorm is evaluated independently.
    """
    primal, p = lifted_primal.fiber_at(x)
    dual_fiber, pd = lifted_dual.fiber_at(x)
    if functionals is None:
        k = primal.dim
        functionals = [tuple(int(i == j) for i in range(k)) for j in range(k)]
        functionals.append(tuple(1 for _ in range(k)))
    worst = 0.0
    for om in functionals:
        om = linalg.matvec(pd, om)
        op = dual_norm(primal, linalg.matvec(p, om))
        own = dual_fiber.norm(om)
        worst = max(worst, abs(float(op) - float(own)))
    return RxReport(x, worst, len(functionals), worst < tol)


def canonical_iso_check(a: LiftedModule, b: LiftedModule, tol=1e-12) -> bool:
    """Two liftings of the same (M, L): the fiberwise identity is an isometric isomorphism."""
    if a.base is not b.base and a.base.fibers != b.base.fibers:
        return False
    for x in a.lifting.measure.space:
        fa, _ = a.fiber_at(x)
        fb, _ = b.fiber_at(x)
        eye = linalg.identity(fa.dim, exact=True)
        if not contraction_check(eye, fa, fb, tol).ok or not contraction_check(eye, fb, fa, tol).ok:
            return False
    return True
