"""Banach bundles over finite measure spaces and the section functor.

A bundle assigns to each positive atom a linear subspace of a fixed ambient
sup-normed space, given by spanning vectors.  Sections are selectors, and the
section functor turns a bundle into a module presentation whose fiber norm is
the ambient sup norm pulled back to span coordinates.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import linalg
from .embedding import (DEFAULT_DEPTH, DEFAULT_RESOLUTION, AmbientSpace, CollectionEntry,
                        embed_collection)
from .errors import (AbsoluteContinuityError, ContractionError, EmbeddingError, MembershipError,
                     SpaceMismatch)
from .lifting import lift_module, make_lifting
from .measure import FunctionClass, Measure, PointMap, disintegrate
from .modules import (ModuleElement, ModuleMorphism, ModulePresentation, dimensional_decomposition,
                      local_basis_indices, pointwise_norm, zero_fiber)
from .norms import ArrayPolyhedral, Polyhedral, contraction_check, norming_functional

MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class SupAmbient:
    """R^dim with the sup norm (coordinates indexed by dual probes)."""

    dim: int

    def norm(self, vec) -> float:
        vec = np.asarray(vec, dtype=float)
        return float(np.abs(vec).max()) if vec.size else 0.0

    def zero(self):
        return np.zeros(self.dim)


def _ambient_json(ambient):
    if isinstance(ambient, AmbientSpace):
        return {"depth": ambient.depth}
    return {"dim": ambient.dim}


def ambient_from_json(obj):
    return AmbientSpace(int(obj["depth"])) if "depth" in obj else SupAmbient(int(obj["dim"]))


def _as_rows(vectors, dim):
    arr = np.asarray(vectors, dtype=float)
    return arr.reshape(-1, dim) if arr.size else np.zeros((0, dim))


@dataclass(frozen=True, eq=False)
class Section:
    values: Mapping

    def __post_init__(self):
        object.__setattr__(self, "values", {x: np.asarray(v, dtype=float) for x, v in self.values.items()})

    def __getitem__(self, x):
        return self.values[x]

    def __add__(self, other):
        return Section({x: v + other.values[x] for x, v in self.values.items()})

    def scale(self, f):
        """f * s for a function class or scalar f."""
        if isinstance(f, FunctionClass):
            return Section({x: float(f.values[x]) * v for x, v in self.values.items()})
        return Section({x: float(f) * v for x, v in self.values.items()})

    def allclose(self, other, tol=1e-9) -> bool:
        return set(self.values) == set(other.values) and all(
            np.allclose(v, other.values[x], atol=tol, rtol=0) for x, v in self.values.items())


@dataclass(frozen=True, eq=False)
class Bundle:
    """x -> span of ``fiber_span[x]`` inside ``ambient`` (full ambient when ``full``)."""

    measure: Measure
    ambient: object
    fiber_span: Mapping = field(default_factory=dict)
    full: bool = False

    def __post_init__(self):
        if self.full:
            object.__setattr__(self, "fiber_span", {})
            return
        spans = {x: _as_rows(self.fiber_span.get(x, ()), self.ambient.dim) for x in self.measure.positive}
        extra = set(self.fiber_span) - set(spans)
        if extra:
            raise SpaceMismatch(f"fibers given over non-positive atoms {sorted(map(str, extra))}")
        object.__setattr__(self, "fiber_span", spans)

    @property
    def atoms(self):
        return self.measure.positive

    def span(self, x):
        if self.full:
            return np.eye(self.ambient.dim)
        return self.fiber_span[x]

    def fiber_dim(self, x) -> int:
        if self.full:
            return self.ambient.dim
        s = self.fiber_span[x]
        return int(np.linalg.matrix_rank(s)) if s.size else 0

    def span_size(self) -> int:
        if self.full:
            return self.ambient.dim
        return max((len(s) for s in self.fiber_span.values()), default=0)

    def coordinates(self, x, w):
        """Least-norm span coordinates of ``w`` at ``x`` and the residual."""
        w = np.asarray(w, dtype=float)
        if self.full:
            return w.copy(), 0.0
        s = self.fiber_span[x]
        if not len(s):
            return np.zeros(0), float(np.abs(w).max()) if w.size else 0.0
        c, *_ = np.linalg.lstsq(s.T, w, rcond=None)
        return c, float(np.abs(s.T @ c - w).max())

    def contains(self, s: Section, tol=MEMBERSHIP_TOL) -> bool:
        if set(s.values) != set(self.atoms):
            return False
        for x in self.atoms:
            _, res = self.coordinates(x, s.values[x])
            if res > tol * max(1.0, self.ambient.norm(s.values[x])):
                return False
        return True

    def check(self, s: Section):
        if not self.contains(s):
            raise MembershipError("section leaves the bundle fibers")

    def section_norm(self, s: Section) -> FunctionClass:
        """Pointwise norm: ambient sup norm atom by atom."""
        return FunctionClass({x: self.ambient.norm(s.values[x]) for x in self.atoms})

    def zero_section(self) -> Section:
        return Section({x: self.ambient.zero() for x in self.atoms})

    def to_json(self):
        out = {"ambient": _ambient_json(self.ambient)}
        if self.full:
            out["full"] = True
        else:
            out["fibers"] = {str(x): s.tolist() for x, s in self.fiber_span.items()}
        return out


def bundle_from_sections(sections, measure: Measure, ambient) -> Bundle:
    """Bundle whose fiber at x is spanned by the values s_n(x)."""
    spans = {}
    for x in measure.positive:
        vecs = []
        for s in sections:
            v = np.asarray(s[x], dtype=float)
            if v.shape != (ambient.dim,):
                raise SpaceMismatch("section values do not live in the ambient space")
            vecs.append(v)
        spans[x] = _as_rows(vecs, ambient.dim)
    return Bundle(measure, ambient, spans)


def dense_section_family(B: Bundle) -> list:
    """Sections x -> n-th span vector (zero where the span is shorter)."""
    n = B.span_size()
    if B.full:
        return [Section({x: np.eye(n)[i] for x in B.atoms}) for i in range(n)]
    out = []
    for i in range(n):
        out.append(Section({x: (s[i] if i < len(s) else B.ambient.zero()) for x, s in B.fiber_span.items()}))
    if all(not np.any(s.values[x]) for s in out for x in B.atoms):
        return []
    return out


def reconstruct_section(B: Bundle, family, s: Section, tol=MEMBERSHIP_TOL):
    """Function-class coefficients c with s = sum c_n family_n, atom by atom."""
    coeffs = [dict() for _ in family]
    for x in B.atoms:
        mat = _as_rows([f.values[x] for f in family], B.ambient.dim)
        w = s.values[x]
        if len(mat):
            c, *_ = np.linalg.lstsq(mat.T, w, rcond=None)
            res = float(np.abs(mat.T @ c - w).max())
        else:
            c, res = np.zeros(0), float(np.abs(w).max())
        if res > tol * max(1.0, float(np.abs(w).max())):
            raise MembershipError(f"section is not in the span of the family at {x!r}")
        for n in range(len(family)):
            coeffs[n][x] = float(c[n])
    return [FunctionClass(c) for c in coeffs]


def _span_fiber(span, gens):
    """Ambient sup norm restricted to the span, as a polyhedral norm in span coordinates."""
    if not len(span):
        return zero_fiber(gens, exact=False)
    mat = np.zeros((gens, span.shape[1]))
    mat[: len(span)] = span
    rows = mat.T
    rows = rows[np.abs(rows).max(axis=1) > 0]
    if not len(rows):
        return zero_fiber(gens, exact=False)
    # |<r, c>| is sign blind: canonical sign, then distinct rows
    lead = rows[np.arange(len(rows)), np.argmax(rows != 0, axis=1)]
    rows = rows * np.where(lead < 0, -1.0, 1.0)[:, None]
    rows = rows[linalg.unique_rows_index(rows)]
    if len(rows) > 64:
        return ArrayPolyhedral(rows)
    return Polyhedral(tuple(map(tuple, rows.tolist())))


@dataclass(frozen=True, eq=False)
class GammaDictionary:
    """Section <-> coefficient element for Gamma(B)."""

    bundle: Bundle
    module: ModulePresentation

    def _span(self, x):
        s = self.bundle.span(x)
        out = np.zeros((self.module.gens, self.bundle.ambient.dim))
        out[: len(s)] = s
        return out

    def to_element(self, s: Section) -> ModuleElement:
        vectors = {}
        for x in self.module.atoms:
            span = self._span(x)
            c, *_ = np.linalg.lstsq(span.T, s.values[x], rcond=None)
            if float(np.abs(span.T @ c - s.values[x]).max(initial=0.0)) > MEMBERSHIP_TOL * max(
                    1.0, self.bundle.ambient.norm(s.values[x])):
                raise MembershipError(f"section leaves the fiber at {x!r}")
            vectors[x] = tuple(float(t) for t in c)
        return self.module.element(vectors)

    def to_section(self, v: ModuleElement) -> Section:
        self.module.check(v)
        return Section({x: np.asarray(v.at(x), dtype=float) @ self._span(x) for x in self.module.atoms})


def gamma_module(B: Bundle):
    """Gamma(B) as a presentation, with its section dictionary."""
    if B.full:
        raise ValueError("the full ambient bundle has no finite presentation here")
    gens = max(1, B.span_size())
    fibers = {x: _span_fiber(B.fiber_span[x], gens) for x in B.atoms}
    M = ModulePresentation(B.measure, gens, fibers)
    return M, GammaDictionary(B, M)


@dataclass(frozen=True)
class AtomDefect:
    certificate: float
    measured: float
    fiber_dim: int


@dataclass(frozen=True)
class RepresentationReport:
    atoms: Mapping
    max_defect: float
    generators: tuple

    def to_json(self):
        return {
            "max_defect": self.max_defect,
            "atoms": {str(x): {"certificate": d.certificate, "measured": d.measured, "fiber_dim": d.fiber_dim}
                      for x, d in self.atoms.items()},
            "generators": [{"generator": i, "section": i} for i in self.generators],
        }


@dataclass(frozen=True, eq=False)
class Representation:
    """Bundle together with the isomorphism between M and Gamma(bundle)."""

    module: ModulePresentation
    bundle: Bundle
    report: RepresentationReport
    embed: Mapping  # atom -> (coefficients at x -> ambient vector)

    def section(self, v: ModuleElement) -> Section:
        self.module.check(v)
        return Section({x: self.embed[x](v.at(x)) for x in self.module.atoms})

    def element(self, s: Section) -> ModuleElement:
        self.bundle.check(s)
        vectors = {}
        for x in self.module.atoms:
            c, _ = self.bundle.coordinates(x, s.values[x])
            vectors[x] = tuple(float(t) for t in c)
        return self.module.element(vectors)

    def generator_sections(self):
        return [self.section(g) for g in self.module.generators()]


def _unit(i, n):
    return tuple(Fraction(int(i == j)) for j in range(n))


def represent_module(M: ModulePresentation, depth=DEFAULT_DEPTH, resolution=DEFAULT_RESOLUTION,
                     tol=None) -> Representation:
    """Embedding-based representation of M as Gamma of a bundle in C(Delta_depth).

    Raises :class:`EmbeddingError` if ``tol`` is given and some atom's
    certificate exceeds it.
    """
    lifted = lift_module(make_lifting(M.measure), M)
    collection = {}
    for x in M.atoms:
        fiber, proj = lifted.fiber_at(x)
        probes = tuple(linalg.matvec(proj, _unit(i, M.gens)) for i in range(M.gens))
        norming = tuple(
            norming_functional(fiber, p).omega if fiber.norm(p) != 0 else tuple(0 for _ in p) for p in probes)
        collection[x] = CollectionEntry(fiber, probes, norming)
    emb = embed_collection(collection, depth, resolution, tol)
    spans, defects, embed = {}, {}, {}
    for x in M.atoms:
        h = emb.handles[x]
        spans[x] = np.asarray([h(p) for p in collection[x].probes]).reshape(M.gens, -1)
        fiber = collection[x].fiber
        measured = max([h.measured_defect(p) for p in collection[x].probes] + [0.0])
        defects[x] = AtomDefect(h.epsilon, measured, fiber.rank)
        embed[x] = h
    bundle = Bundle(M.measure, emb.ambient, spans)
    max_defect = max((d.certificate for d in defects.values()), default=0.0)
    report = RepresentationReport(defects, max_defect, tuple(range(M.gens)))
    return Representation(M, bundle, report, embed)


def _probe_stream(n):
    """Generators, then primitive integer vectors by growing sup norm, first nonzero positive."""
    seen = set()
    for i in range(n):
        v = tuple(int(i == j) for j in range(n))
        seen.add(v)
        yield v
    if n == 1:
        # a single direction: later probes repeat it
        yield from ((k,) for k in itertools.count(2))
        return
    for size in itertools.count(1):
        rng = range(-size, size + 1)
        for v in itertools.product(rng, repeat=n):
            if max(map(abs, v)) != size or v in seen:
                continue
            first = next(t for t in v if t != 0)
            if first < 0 or math.gcd(*v) != 1:
                continue
            seen.add(v)
            yield v


def dual_probes(M: ModulePresentation, K: int) -> list:
    """First K probe elements and their norming functionals, atom by atom."""
    if K < M.gens:
        raise ValueError("truncation K must be at least the number of generators")
    probes = list(itertools.islice(_probe_stream(M.gens), K))
    out = []
    for v in probes:
        omegas = {}
        for x in M.atoms:
            f = M.fibers[x]
            vec = tuple(Fraction(t) for t in v)
            omegas[x] = norming_functional(f, vec).omega if f.norm(vec) != 0 else tuple(Fraction(0) for _ in v)
        out.append((v, omegas))
    return out


def _no_ac_defect(fiber, omegas) -> float:
    """1 - 1/max{|u| : |w_n(u)| <= 1}, or 1 if that set is unbounded mod the kernel."""
    if fiber.rank == 0:
        return 0.0
    rows = [w for w in omegas if any(t != 0 for t in w)]
    if not rows or linalg.rank(rows, fiber.dim) < fiber.rank:
        return 1.0
    verts = Polyhedral(tuple(rows)).unit_ball_vertices()
    big = max(float(fiber.norm(u)) for u in verts)
    return max(0.0, 1.0 - 1.0 / big)


def represent_module_no_ac(M: ModulePresentation, K: int) -> Representation:
    """Pairing-matrix representation in (R^K, sup) without a lifting."""
    probes = dual_probes(M, K)
    ambient = SupAmbient(K)
    spans, defects, embed = {}, {}, {}
    for x in M.atoms:
        omegas = [om[x] for _, om in probes]
        mat = np.asarray([[float(t) for t in w] for w in omegas]).reshape(K, M.gens)
        spans[x] = mat.T.copy()
        d = _no_ac_defect(M.fibers[x], omegas)
        defects[x] = AtomDefect(d, d, M.fibers[x].rank)
        embed[x] = (lambda c, mat=mat: mat @ np.asarray([float(t) for t in c]))
    bundle = Bundle(M.measure, ambient, spans)
    max_defect = max((d.certificate for d in defects.values()), default=0.0)
    return Representation(M, bundle, RepresentationReport(defects, max_defect, tuple(range(M.gens))), embed)


def no_ac_defect_profile(M: ModulePresentation, K_max: int) -> list:
    """Max reported no-AC defect for K = gens, ..., K_max, sharing one probe list."""
    probes = dual_probes(M, K_max)
    out = []
    for K in range(M.gens, K_max + 1):
        out.append(max((_no_ac_defect(M.fibers[x], [om[x] for _, om in probes[:K]]) for x in M.atoms),
                       default=0.0))
    return out


@dataclass(frozen=True, eq=False)
class BundleMorphism:
    """Per-atom matrices in span coordinates (target span size x source span size)."""

    source: Bundle
    target: Bundle
    matrices: Mapping

    def __post_init__(self):
        mats = {x: np.asarray(self.matrices[x], dtype=float) for x in self.source.atoms}
        object.__setattr__(self, "matrices", mats)

    def at(self, x, w):
        c, _ = self.source.coordinates(x, w)
        mat = self.matrices[x]
        c = np.concatenate([c, np.zeros(mat.shape[1] - len(c))]) if len(c) < mat.shape[1] else c
        out = mat @ c
        return out @ self.target.span(x)[: len(out)] if len(out) else self.target.ambient.zero()

    def __call__(self, s: Section) -> Section:
        return apply_section_functor(self, s)

    def compose(self, first: "BundleMorphism") -> "BundleMorphism":
        """self o first."""
        return BundleMorphism(first.source, self.target,
                              {x: self.matrices[x] @ first.matrices[x] for x in first.source.atoms})

    def functor_image(self, src_module, dst_module) -> ModuleMorphism:
        """Gamma of this morphism on the span-coordinate presentations."""
        return ModuleMorphism(src_module, dst_module, {x: self.matrices[x].tolist() for x in src_module.atoms})

    @classmethod
    def identity(cls, B: Bundle):
        return cls(B, B, {x: np.eye(len(B.span(x))) for x in B.atoms})


def apply_section_functor(phi: BundleMorphism, s: Section) -> Section:
    phi.source.check(s)
    return Section({x: phi.at(x, s.values[x]) for x in phi.source.atoms})


def morphism_from_module_map(Phi: ModuleMorphism, src: Representation, dst: Representation,
                             tol=1e-9) -> BundleMorphism:
    """Bundle morphism whose section functor is Phi on the generating family."""
    if Phi.source is not src.module and Phi.source.fibers != src.module.fibers:
        raise SpaceMismatch("morphism source is not the represented module")
    if Phi.target is not dst.module and Phi.target.fibers != dst.module.fibers:
        raise SpaceMismatch("morphism target is not the represented module")
    mats = {x: np.asarray([[float(t) for t in r] for r in Phi.matrices[x]]).reshape(dst.module.gens, src.module.gens)
            for x in src.module.atoms}
    out = BundleMorphism(src.bundle, dst.bundle, mats)
    src_gamma, _ = gamma_module(src.bundle)
    dst_gamma, _ = gamma_module(dst.bundle)
    eps = src.report.max_defect
    slack = (eps / (1 - eps) if eps < 1 else math.inf) + tol
    for x in src.module.atoms:
        rep = contraction_check(mats[x].tolist(), src_gamma.fibers[x], dst_gamma.fibers[x], tol=slack)
        if not rep.ok:
            raise ContractionError(f"bundle map is not a contraction at atom {x!r} (defect {rep.defect:.3g})")
    return out


def faithfulness_witness(phi: BundleMorphism, psi: BundleMorphism, tol=1e-9):
    """(atom, generator index) where the section functor images differ, or None."""
    gens = dense_section_family(phi.source)
    for x in phi.source.atoms:
        for i, g in enumerate(gens):
            a, b = phi.at(x, g.values[x]), psi.at(x, g.values[x])
            if np.abs(a - b).max(initial=0.0) > tol:
                return x, i
    return None


def _check_ac(phi: PointMap, m_x: Measure, m_y: Measure):
    if phi.source != m_x.space or phi.target != m_y.space:
        raise SpaceMismatch("map does not go between the measures' spaces")
    bad = [x for x in m_x.positive if m_y.mass[phi(x)] == 0]
    if bad:
        raise AbsoluteContinuityError(f"positive atoms {bad} are sent onto null atoms")


def pullback_bundle(phi: PointMap, B: Bundle, m_x: Measure) -> Bundle:
    _check_ac(phi, m_x, B.measure)
    if B.full:
        return Bundle(m_x, B.ambient, full=True)
    return Bundle(m_x, B.ambient, {x: B.fiber_span[phi(x)] for x in m_x.positive})


def pullback_section(phi: PointMap, s: Section, m_x: Measure) -> Section:
    return Section({x: s.values[phi(x)] for x in m_x.positive})


@dataclass(frozen=True)
class PullbackReport:
    residual: float
    approximant_residual: float
    norm_transport_error: float
    checked: int
    ok: bool


def pullback_commute_check(B: Bundle, phi: PointMap, m_x: Measure, sections=None, tol=1e-9, seed=0):
    """Every section of phi^*B is a function-class combination of pulled-back sections."""
    pb = pullback_bundle(phi, B, m_x)
    rng = np.random.default_rng(seed)
    family = dense_section_family(B)
    pulled = [pullback_section(phi, s, m_x) for s in family]
    if sections is None:
        sections = []
        for _ in range(4):
            vals = {}
            for x in pb.atoms:
                span = pb.span(x)
                vals[x] = rng.integers(-3, 4, size=len(span)) @ span if len(span) else pb.ambient.zero()
            sections.append(Section(vals))
    residual = approx = transport = 0.0
    dis = disintegrate(phi, m_x)
    for t in sections:
        pb.check(t)
        if pulled:
            coeffs = reconstruct_section(pb, pulled, t)
            rec = {x: sum(float(c.values[x]) * p.values[x] for c, p in zip(coeffs, pulled)) for x in pb.atoms}
        else:
            rec = {x: pb.ambient.zero() for x in pb.atoms}
        residual = max(residual, max((float(np.abs(rec[x] - t.values[x]).max(initial=0.0)) for x in pb.atoms),
                                     default=0.0))
        # fiber averages over the finest partition {x}, glued by indicators
        for x in pb.atoms:
            w = dis.family[phi(x)]
            s_x = (w[x] * t.values[x]) / w[x] if w[x] else t.values[x]
            approx = max(approx, float(np.abs(s_x - t.values[x]).max(initial=0.0)))
    for s in family:
        ps = pullback_section(phi, s, m_x)
        for x in pb.atoms:
            transport = max(transport, abs(pb.ambient.norm(ps.values[x]) - B.ambient.norm(s.values[phi(x)])))
    ok = residual <= tol and approx <= tol and transport <= 1e-12
    return PullbackReport(residual, approx, transport, len(sections), ok)


def pr_phi_section(t: Section, phi: PointMap, B: Bundle, m_x: Measure) -> Section:
    """y -> integral of t against the conditional measure on phi^{-1}(y).

    Atoms of Y that are positive for B but carry no pushed-forward mass get 0.
    """
    _check_ac(phi, m_x, B.measure)
    dis = disintegrate(phi, m_x)
    out = {}
    for y in B.atoms:
        fam = dis.family.get(y)
        acc = B.ambient.zero()
        if fam is not None:
            for x, p in fam.items():
                if p != 0:
                    acc = acc + float(p) * t.values[x]
        out[y] = acc
    return Section(out)


@dataclass(frozen=True, eq=False)
class GradedBlock:
    atoms: tuple
    dim: int
    fibers: Mapping  # atom -> FiberNorm on R^dim (None when dim == 0)
    basis: Mapping  # atom -> generator indices

    def norm(self, x, lam):
        if self.dim == 0:
            return Fraction(0)
        return self.fibers[x].norm(lam)


@dataclass(frozen=True, eq=False)
class GradedBundle:
    module: ModulePresentation
    blocks: tuple

    def block_of(self, x) -> GradedBlock:
        for b in self.blocks:
            if x in b.atoms:
                return b
        raise KeyError(x)

    def coordinates(self, v: ModuleElement) -> dict:
        """x -> lambda with v(x) = B lambda modulo the kernel."""
        self.module.check(v)
        out = {}
        for b in self.blocks:
            for x in b.atoms:
                out[x] = _basis_coords(self.module.fibers[x], b.basis[x], v.at(x))
        return out

    def element(self, lam: Mapping) -> ModuleElement:
        vectors = {}
        for b in self.blocks:
            for x in b.atoms:
                vec = [Fraction(0)] * self.module.gens
                for j, i in enumerate(b.basis[x]):
                    vec[i] = lam[x][j]
                vectors[x] = tuple(vec)
        return self.module.element(vectors)

    def pointwise_norm(self, lam: Mapping) -> FunctionClass:
        return FunctionClass({x: self.block_of(x).norm(x, lam[x]) for x in self.module.atoms})

    def to_json(self):
        return {"blocks": [
            {"atoms": [str(x) for x in b.atoms], "dim": b.dim,
             "basis": {str(x): list(b.basis[x]) for x in b.atoms},
             "fibers": {str(x): (b.fibers[x].to_json() if b.dim else None) for x in b.atoms}}
            for b in self.blocks]}


def _basis_coords(fiber, basis, v):
    k = fiber.dim
    ker = fiber.kernel_basis()
    cols = [_unit(i, k) for i in basis] + list(ker)
    a_rows = [tuple(c[r] for c in cols) for r in range(k)]
    sol = linalg.solve(a_rows, tuple(v)) if cols else ()
    if sol is None:
        raise MembershipError("vector is not in the span of the local basis modulo the kernel")
    return tuple(sol[: len(basis)])


def graded_representation(M: ModulePresentation) -> GradedBundle:
    """Exact dimension-graded representation from local bases."""
    dec = dimensional_decomposition(M)
    blocks = []
    for n, atoms in dec.blocks.items():
        if not atoms:
            continue
        idx = local_basis_indices(M, atoms)
        fibers = {}
        for x in atoms:
            if n == 0:
                fibers[x] = None
                continue
            w_rows = [tuple(Fraction(int(i == j)) for j in idx[x]) for i in range(M.gens)]
            fibers[x] = M.fibers[x].compose(w_rows)
        blocks.append(GradedBlock(tuple(atoms), n, fibers, idx))
    return GradedBundle(M, tuple(blocks))


def universal_bundle(m: Measure, ambient) -> Bundle:
    """x -> the whole ambient space."""
    return Bundle(m, ambient, full=True)


def embed_in_universal(M: ModulePresentation, depth=DEFAULT_DEPTH, resolution=DEFAULT_RESOLUTION, tol=None):
    """Universal bundle over M's measure and the norm-preserving map M -> its sections."""
    rep = represent_module(M, depth, resolution, tol)
    U = universal_bundle(M.measure, rep.bundle.ambient)
    return U, rep.section, rep
