"""Finitely-generated normed L0-modules given by per-atom seminorm presentations.

A presentation with N generators assigns to every positive atom x a seminorm
on R^N; an element is an N-tuple of function classes, read at x as the
coefficient vector of the generators.  Two elements are equal in the module
when their difference has zero pointwise norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import linalg
from ._num import all_exact, dot
from .errors import (AbsoluteContinuityError, ContractionError, PartitionError, RankError,
                     SpaceMismatch, ZeroMass)
from .measure import FunctionClass, Measure, PointMap, _sum, disintegrate, l0_distance, pushforward
from .norms import FiberNorm, WeightedLp, contraction_check, sphere_samples


@dataclass(frozen=True, eq=False)
class ModulePresentation:
    measure: Measure
    gens: int
    fibers: Mapping

    def __post_init__(self):
        fibers = dict(self.fibers)
        pos = self.measure.positive
        missing = [a for a in pos if a not in fibers]
        if missing:
            raise SpaceMismatch(f"no fiber given for positive atoms {missing}")
        fibers = {a: fibers[a] for a in pos}
        if self.gens < 1:
            raise ValueError("a presentation needs at least one generator")
        bad = [a for a, f in fibers.items() if f.dim != self.gens]
        if bad:
            raise SpaceMismatch(f"fibers at {bad} do not have dimension {self.gens}")
        object.__setattr__(self, "fibers", fibers)

    @classmethod
    def uniform(cls, measure: Measure, fiber: FiberNorm) -> "ModulePresentation":
        return cls(measure, fiber.dim, {a: fiber for a in measure.positive})

    @property
    def atoms(self):
        return self.measure.positive

    def rank_at(self, x) -> int:
        return self.fibers[x].rank

    def zero(self) -> "ModuleElement":
        return ModuleElement(tuple(FunctionClass.constant(Fraction(0), self.measure) for _ in range(self.gens)))

    def generator(self, i) -> "ModuleElement":
        m = self.measure
        return ModuleElement(tuple(FunctionClass.constant(Fraction(int(i == j)), m) for j in range(self.gens)))

    def generators(self):
        return [self.generator(i) for i in range(self.gens)]

    def element(self, vectors: Mapping) -> "ModuleElement":
        """Element from a map atom -> coefficient vector."""
        return ModuleElement(tuple(
            FunctionClass({a: vectors[a][i] for a in self.atoms}) for i in range(self.gens)))

    def check(self, v: "ModuleElement"):
        if len(v.coeffs) != self.gens:
            raise SpaceMismatch(f"element has {len(v.coeffs)} coefficients, module has {self.gens} generators")
        for c in v.coeffs:
            if set(c.values) != set(self.atoms):
                raise SpaceMismatch("element coefficients are not classes over this measure")


@dataclass(frozen=True, eq=False)
class ModuleElement:
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    def at(self, x) -> tuple:
        return tuple(c.values[x] for c in self.coeffs)

    def __add__(self, other):
        return ModuleElement(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return ModuleElement(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return ModuleElement(tuple(-a for a in self.coeffs))

    def scale(self, f) -> "ModuleElement":
        """f * v for a function class or scalar f."""
        return ModuleElement(tuple(f * c for c in self.coeffs))

    def __eq__(self, other):
        return isinstance(other, ModuleElement) and self.coeffs == other.coeffs

    __hash__ = None


def pointwise_norm(M: ModulePresentation, v: ModuleElement) -> FunctionClass:
    M.check(v)
    return FunctionClass({x: M.fibers[x].norm(v.at(x)) for x in M.atoms})


def same_element(M, v, w, tol=0) -> bool:
    return all(abs(n) <= tol for n in pointwise_norm(M, v - w).values.values())


def module_distance(M, v, w):
    """d(v, w) = int |v - w| ^ 1 dm'."""
    m = M.measure
    if m.total == 0:
        raise ZeroMass("distance needs positive total mass")
    nrm = pointwise_norm(M, v - w)
    one = 1 if all_exact(nrm.values.values()) else 1.0
    return _sum(min(abs(nrm[x]), one) * m.mass[x] for x in M.atoms) / m.total


def restrict_element(v: ModuleElement, atoms) -> ModuleElement:
    """chi_A * v."""
    atoms = set(atoms)
    return ModuleElement(tuple(
        FunctionClass({x: (c if x in atoms else c * 0) for x, c in f.values.items()}) for f in v.coeffs))


def _check_partition(M, partition):
    blocks = [set(b) for b in partition]
    seen = set()
    for b in blocks:
        if seen & b:
            raise PartitionError("partition blocks overlap")
        seen |= b
    pos = set(M.atoms)
    if not pos <= seen:
        raise PartitionError(f"partition misses positive atoms {sorted(pos - seen, key=str)}")
    return blocks


def glue_elements(M: ModulePresentation, partition, elems) -> ModuleElement:
    """The unique element agreeing with ``elems[n]`` on ``partition[n]``."""
    if len(partition) != len(elems):
        raise PartitionError("need exactly one element per block")
    blocks = _check_partition(M, partition)
    vectors = {}
    for block, e in zip(blocks, elems):
        M.check(e)
        for x in block & set(M.atoms):
            vectors[x] = e.at(x)
    return M.element(vectors)


@dataclass(frozen=True)
class CRReport:
    bounded: bool
    completion_equal: bool
    restriction_equal: bool
    max_discrepancy: float
    checked: int


def cr_roundtrip_check(M: ModulePresentation, elements=None) -> CRReport:
    """Completion/restriction round trips at finite scale.

    R(M) keeps elements with bounded pointwise norm: all of them, since there
    are finitely many atoms.  The completion metric is read off the pointwise
    norms through the L0 distance and must coincide with the module distance.
    Cauchy sequences v + 2^-n w are checked to converge inside M.
    """
    if elements is None:
        gens = M.generators()
        elements = gens + [a - b for a in gens for b in gens] + [M.zero()]
    zero_cls = FunctionClass.constant(Fraction(0), M.measure)
    bounded = all(max(pointwise_norm(M, v).values.values(), default=0) < float("inf") for v in elements)
    disc = 0
    for v in elements:
        for w in elements:
            d_mod = module_distance(M, v, w)
            d_cmp = l0_distance(pointwise_norm(M, v - w), zero_cls, M.measure)
            disc = max(disc, abs(d_mod - d_cmp))
    converges = True
    for v in elements[:4]:
        for w in elements[:4]:
            seq = [v + w.scale(Fraction(1, 2 ** n)) for n in range(1, 30)]
            tail = [module_distance(M, s, v) for s in seq[-3:]]
            if not all(t < Fraction(1, 2 ** 25) * (1 + max(pointwise_norm(M, w).values.values(), default=0)) for t in tail):
                converges = False
    return CRReport(bounded, converges and bounded, bounded, float(disc), len(elements))


def dual_module(M: ModulePresentation) -> ModulePresentation:
    """Per-atom dual seminorms; functionals not annihilating the kernel go to the dual kernel."""
    return ModulePresentation(M.measure, M.gens, {x: f.dual() for x, f in M.fibers.items()})


def pairing(M: ModulePresentation, omega: ModuleElement, v: ModuleElement) -> FunctionClass:
    """omega(v) for omega in the dual module of M, evaluated on quotient representatives."""
    out = {}
    for x in M.atoms:
        p = M.fibers[x].quotient_projector()
        out[x] = dot(linalg.matvec(p, omega.at(x)), linalg.matvec(p, v.at(x)))
    return FunctionClass(out)


@dataclass(frozen=True)
class DimensionalDecomposition:
    blocks: Mapping

    def block(self, n):
        return self.blocks.get(n, ())


def dimensional_decomposition(M: ModulePresentation) -> DimensionalDecomposition:
    blocks = {n: [] for n in range(M.gens + 1)}
    for x in M.atoms:
        blocks[M.rank_at(x)].append(x)
    return DimensionalDecomposition({n: tuple(b) for n, b in blocks.items()})


def _rank_mod_kernel(fiber: FiberNorm, indices) -> int:
    k = fiber.dim
    ker = fiber.kernel_basis()
    vecs = [tuple(Fraction(int(j == i)) for j in range(k)) for i in indices]
    return linalg.rank(list(ker) + vecs, k) - len(ker) if vecs else 0


def local_basis_indices(M: ModulePresentation, atoms) -> dict:
    """Per atom, the lowest-index generators that are independent modulo the kernel."""
    atoms = [x for x in M.measure.space.sort(atoms) if x in M.fibers]
    ranks = {M.rank_at(x) for x in atoms}
    if len(ranks) > 1:
        raise RankError(f"rank is not constant on the given set: {sorted(ranks)}")
    out = {}
    for x in atoms:
        chosen = []
        fiber = M.fibers[x]
        for i in range(M.gens):
            if _rank_mod_kernel(fiber, chosen + [i]) > len(chosen):
                chosen.append(i)
        out[x] = tuple(chosen)
    return out


def local_basis(M: ModulePresentation, atoms) -> list:
    """Glued coordinate generators forming a local basis on ``atoms``."""
    idx = local_basis_indices(M, atoms)
    if not idx:
        return []
    n = len(next(iter(idx.values())))
    out = []
    for j in range(n):
        vectors = {}
        for x in M.atoms:
            if x in idx:
                vectors[x] = tuple(Fraction(int(i == idx[x][j])) for i in range(M.gens))
            else:
                vectors[x] = tuple(Fraction(0) for _ in range(M.gens))
        out.append(M.element(vectors))
    return out


def is_independent_on(M, elems, atoms) -> bool:
    for x in atoms:
        fiber = M.fibers[x]
        ker = fiber.kernel_basis()
        vecs = [e.at(x) for e in elems]
        if linalg.rank(list(ker) + vecs, M.gens) - len(ker) != len(vecs):
            return False
    return True


def generates_on(M, elems, atoms) -> bool:
    for x in atoms:
        fiber = M.fibers[x]
        ker = fiber.kernel_basis()
        vecs = [e.at(x) for e in elems]
        if linalg.rank(list(ker) + vecs, M.gens) != M.gens:
            return False
    return True


@dataclass(frozen=True, eq=False)
class ModuleMorphism:
    """Per-atom coefficient matrices (target gens x source gens)."""

    source: ModulePresentation
    target: ModulePresentation
    matrices: Mapping

    def __post_init__(self):
        mats = {x: tuple(tuple(r) for r in self.matrices[x]) for x in self.source.atoms}
        for x, t in mats.items():
            if len(t) != self.target.gens or any(len(r) != self.source.gens for r in t):
                raise SpaceMismatch(f"matrix at {x!r} has the wrong shape")
        object.__setattr__(self, "matrices", mats)

    def __call__(self, v: ModuleElement) -> ModuleElement:
        self.source.check(v)
        return self.target.element({x: linalg.matvec(self.matrices[x], v.at(x)) for x in self.source.atoms})

    def compose(self, first: "ModuleMorphism") -> "ModuleMorphism":
        """self o first."""
        return ModuleMorphism(first.source, self.target,
                              {x: linalg.matmul(self.matrices[x], first.matrices[x]) for x in first.source.atoms})

    def contraction_defects(self, tol=1e-9) -> dict:
        return {x: contraction_check(self.matrices[x], self.source.fibers[x], self.target.fibers[x], tol)
                for x in self.source.atoms}

    def check_contraction(self, tol=1e-9):
        for x, rep in self.contraction_defects(tol).items():
            if not rep.ok:
                raise ContractionError(f"not a contraction at atom {x!r} (defect {rep.defect})")
        return self

    @classmethod
    def identity(cls, M):
        eye = linalg.identity(M.gens)
        return cls(M, M, {x: eye for x in M.atoms})


def norm_preserving(src: FiberNorm, dst: FiberNorm, t_rows, tol=1e-9, samples=64) -> bool:
    tests = [tuple(Fraction(int(i == j)) for i in range(src.dim)) for j in range(src.dim)]
    tests += sphere_samples(src, samples, seed=1)
    for v in tests:
        if abs(float(dst.norm(linalg.matvec(t_rows, v))) - float(src.norm(v))) > tol * (1 + float(src.norm(v))):
            return False
    return True


@dataclass(frozen=True, eq=False)
class Submodule:
    """A presentation together with its norm-preserving inclusion into a parent."""

    presentation: ModulePresentation
    inclusion: ModuleMorphism


def nested_chain(M: ModulePresentation) -> list:
    """Increasing submodules N_1 <= ... <= N_d of local dimension 1..d.

    Each new generator is glued from coordinate generators: at every atom it
    is the first generator independent of the ones already chosen.
    """
    ranks = {M.rank_at(x) for x in M.atoms}
    if len(ranks) > 1:
        raise RankError(f"rank is not constant: {sorted(ranks)}; localize first")
    d = ranks.pop() if ranks else 0
    picks = {x: [] for x in M.atoms}
    chain = []
    for n in range(1, d + 1):
        for x in M.atoms:
            fiber = M.fibers[x]
            for k in range(M.gens):
                if _rank_mod_kernel(fiber, picks[x] + [k]) == n:
                    picks[x].append(k)
                    break
        cols = {x: tuple(tuple(Fraction(int(i == k)) for k in picks[x]) for i in range(M.gens)) for x in M.atoms}
        sub = ModulePresentation(M.measure, n, {x: M.fibers[x].compose(cols[x]) for x in M.atoms})
        chain.append(Submodule(sub, ModuleMorphism(sub, M, cols)))
    return chain


def chain_inclusion(small: ModulePresentation, big: ModulePresentation) -> ModuleMorphism:
    """lambda -> (lambda, 0) between consecutive chain members."""
    mat = tuple(tuple(Fraction(int(i == j)) for j in range(small.gens)) for i in range(big.gens))
    return ModuleMorphism(small, big, {x: mat for x in small.atoms})


@dataclass(frozen=True, eq=False)
class DirectLimit:
    module: ModulePresentation
    legs: tuple
    chain: tuple
    inclusions: tuple

    def factor(self, maps, tol=1e-12) -> ModuleMorphism:
        """Unique morphism from the limit through which the compatible ``maps`` factor."""
        if len(maps) != len(self.chain):
            raise ValueError("need one morphism per chain member")
        for n, inc in enumerate(self.inclusions):
            lhs = maps[n + 1].compose(inc)
            for x in self.chain[n].atoms:
                if not _close(lhs.matrices[x], maps[n].matrices[x], tol):
                    raise ValueError(f"maps are not compatible at stage {n}, atom {x!r}")
        phi = maps[-1]
        for n, leg in enumerate(self.legs):
            back = phi.compose(leg)
            for x in self.chain[n].atoms:
                if not _close(back.matrices[x], maps[n].matrices[x], tol):
                    raise AssertionError("factorization failed")
        return phi


def _close(a, b, tol):
    return all(abs(x - y) <= tol for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def direct_limit_chain(chain, inclusions, tol=1e-9) -> DirectLimit:
    """Limit of an increasing chain; finite chains stabilise at their last member."""
    chain = tuple(chain)
    inclusions = tuple(inclusions)
    if not chain:
        raise ValueError("empty chain")
    if len(inclusions) != len(chain) - 1:
        raise ValueError("need one inclusion between consecutive members")
    for n, inc in enumerate(inclusions):
        if chain[n + 1].gens < chain[n].gens:
            raise ValueError("chain is not monotone")
        for x in chain[n].atoms:
            if not norm_preserving(chain[n].fibers[x], chain[n + 1].fibers[x], inc.matrices[x], tol):
                raise ValueError(f"inclusion {n} does not preserve the pointwise norm at {x!r}")
    legs = [None] * len(chain)
    legs[-1] = ModuleMorphism.identity(chain[-1])
    for n in range(len(chain) - 2, -1, -1):
        legs[n] = legs[n + 1].compose(inclusions[n])
    return DirectLimit(chain[-1], tuple(legs), chain, inclusions)


def zero_fiber(gens, exact=True) -> FiberNorm:
    z = Fraction(0) if exact else 0.0
    return WeightedLp(1, tuple(z for _ in range(gens)))


def localize(M: ModulePresentation, atoms) -> ModulePresentation:
    """M restricted to A, over the measure chi_A m."""
    m_a = M.measure.restrict(atoms)
    if m_a.total == 0:
        raise ZeroMass("cannot localize to a null set")
    return ModulePresentation(m_a, M.gens, {x: M.fibers[x] for x in m_a.positive})


def extend(N: ModulePresentation, m: Measure) -> ModulePresentation:
    """Extension by zero fibers off the support of N's measure."""
    fibers = {x: (N.fibers[x] if x in N.fibers else zero_fiber(N.gens)) for x in m.positive}
    return ModulePresentation(m, N.gens, fibers)


def localize_extend(M: ModulePresentation, atoms):
    loc = localize(M, atoms)
    return loc, extend(loc, M.measure)


def localize_element(v: ModuleElement, loc: ModulePresentation) -> ModuleElement:
    return ModuleElement(tuple(FunctionClass({x: c.values[x] for x in loc.atoms}) for c in v.coeffs))


def extend_element(v: ModuleElement, ext: ModulePresentation) -> ModuleElement:
    return ModuleElement(tuple(
        FunctionClass({x: c.values.get(x, Fraction(0)) for x in ext.atoms}) for c in v.coeffs))


def _check_ac(phi: PointMap, m_x: Measure, m_y: Measure):
    if phi.source != m_x.space or phi.target != m_y.space:
        raise SpaceMismatch("map does not go between the measures' spaces")
    bad = [x for x in m_x.positive if m_y.mass[phi(x)] == 0]
    if bad:
        raise AbsoluteContinuityError(f"positive atoms {bad} are sent onto null atoms")


def pullback_module(phi: PointMap, M: ModulePresentation, m_x: Measure) -> ModulePresentation:
    _check_ac(phi, m_x, M.measure)
    return ModulePresentation(m_x, M.gens, {x: M.fibers[phi(x)] for x in m_x.positive})


def pullback_element(phi: PointMap, v: ModuleElement, m_x: Measure) -> ModuleElement:
    """phi^* v, with coefficients f_i o phi."""
    return ModuleElement(tuple(FunctionClass({x: c.values[phi(x)] for x in m_x.positive}) for c in v.coeffs))


def pr_phi_module(t: ModuleElement, phi: PointMap, M: ModulePresentation, m_x: Measure) -> ModuleElement:
    """Fiberwise disintegration average of an element of phi^* M.

    Atoms of Y that are positive for M but carry no pushed-forward mass get 0.
    """
    _check_ac(phi, m_x, M.measure)
    dis = disintegrate(phi, m_x)
    vectors = {}
    for y in M.atoms:
        fam = dis.family.get(y)
        if fam is None:
            vectors[y] = tuple(Fraction(0) for _ in range(M.gens))
            continue
        vectors[y] = tuple(_avg(c, fam) for c in t.coeffs)
    return M.element(vectors)


def _avg(c: FunctionClass, fam) -> object:
    terms = [c.values[x] * p for x, p in fam.items() if p != 0]
    if all_exact(terms):
        return sum(terms, Fraction(0))
    return float(np.sum(np.asarray(terms, dtype=float)))
