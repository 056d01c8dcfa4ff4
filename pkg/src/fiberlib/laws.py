"""Named law checkers over seeded random instances.

Each law takes ``(rng, size)`` and raises :class:`LawViolation` with a JSON
dump of the offending instance.  ``run_suite`` drives them and shrinks a
failure by retrying at smaller sizes.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import generate as gen
from . import io
from .bundle import (gamma_module, graded_representation, pr_phi_section, pullback_bundle,
                     pullback_commute_check, pullback_section, represent_module, represent_module_no_ac)
from .embedding import cantor_metric, code_of, embed_fiber, point_of, retract
from .lifting import (lift_function, lift_module, lift_pairing, lift_set, make_lifting, project_Pi_m,
                      rx_isometry_check)
from .measure import (FunctionClass, TotalFunction, disintegrate, l0_distance, pr_phi_function,
                      pr_phi_radon_nikodym, project_class, pushforward)
from .modules import (ModulePresentation, cr_roundtrip_check, dimensional_decomposition, dual_module,
                      glue_elements, pointwise_norm, pr_phi_module, pullback_element, pullback_module,
                      restrict_element)
from .norms import FiberNorm, dual_norm, norming_functional

TOL = 1e-12


class LawViolation(AssertionError):
    def __init__(self, law, detail, instance=None):
        super().__init__(f"{law}: {detail}")
        self.law = law
        self.detail = detail
        self.instance = instance or {}


def _fail(law, detail, **inst):
    raise LawViolation(law, detail, {k: _jsonable(v) for k, v in inst.items()})


def _jsonable(v):
    if isinstance(v, ModulePresentation):
        return io.presentation_to_json(v)
    if hasattr(v, "space") and hasattr(v, "mass"):
        return io.measure_to_json(v)
    if isinstance(v, FunctionClass):
        return io.function_to_json(v)
    if isinstance(v, FiberNorm):
        return v.to_json()
    if isinstance(v, (list, tuple)):
        return [_jsonable(t) for t in v]
    if isinstance(v, Fraction):
        return str(v)
    return v if isinstance(v, (int, float, str, type(None), dict)) else repr(v)


@dataclass(frozen=True, eq=False)
class FaultyNorm(FiberNorm):
    """l^(1/2)-type quasi-norm over the base's coordinate norms (fault injection).

    Positively homogeneous, but the triangle inequality fails, e.g. on e1, e2.
    """

    base: FiberNorm

    @property
    def dim(self):
        return self.base.dim

    def norm(self, v):
        k = self.dim
        parts = (float(self.base.norm(tuple(t if i == j else 0 for j, t in enumerate(v)))) for i in range(k))
        return sum(math.sqrt(p) for p in parts) ** 2

    def kernel_basis(self):
        return self.base.kernel_basis()

    def exact(self):
        return self.base.exact()

    def to_json(self):
        return {"kind": "faulty", "base": self.base.to_json()}


def _le(a, b, tol=TOL):
    return a <= b + tol * max(1.0, abs(float(b)))


def _close(a, b, tol=TOL):
    return abs(float(a) - float(b)) <= tol * max(1.0, abs(float(a)), abs(float(b)))


# measure ---------------------------------------------------------------------

def law_l0_metric(rng, size, fault=False):
    m = gen.random_measure(rng, max_atoms=size + 1)
    f, g, h = (gen.random_function(rng, m) for _ in range(3))
    d = lambda a, b: l0_distance(a, b, m)
    if d(f, f) != 0 or d(f, g) != d(g, f) or not d(f, h) <= d(f, g) + d(g, h):
        _fail("measure.l0_metric", "metric axiom fails", measure=m, f=f, g=g, h=h)


def law_disintegration(rng, size, fault=False):
    m = gen.random_measure(rng, max_atoms=size + 2)
    phi, m_y = gen.random_map(rng, m)
    dis = disintegrate(phi, m)
    f = {x: gen.rational(rng) for x in m.space}
    lhs = sum((f[x] * m.mass[x] for x in m.space), Fraction(0))
    rhs = sum((dis.integrate(f, y) * m_y.mass[y] for y in m_y.positive), Fraction(0))
    if lhs != rhs:
        _fail("measure.disintegration", f"{lhs} != {rhs}", measure=m, assign=dict(phi.assignment))
    for y, fam in dis.family.items():
        if sum(fam.values(), Fraction(0)) != 1 or any(p != 0 and phi(x) != y for x, p in fam.items()):
            _fail("measure.disintegration", "conditional measure is not a probability on the fiber",
                  measure=m, assign=dict(phi.assignment))


def law_pr_phi_functions(rng, size, fault=False):
    m = gen.random_measure(rng, max_atoms=size + 2)
    phi, m_y = gen.random_map(rng, m)
    f = gen.random_function(rng, m)
    a, b = pr_phi_function(f, phi, m), pr_phi_radon_nikodym(f, phi, m)
    if a != b:
        _fail("measure.pr_phi_paths", "Radon-Nikodym and disintegration paths differ",
              measure=m, assign=dict(phi.assignment), f=f)
    g = FunctionClass({y: gen.rational(rng) for y in m_y.positive})
    from .measure import compose_class
    if pr_phi_function(compose_class(g, phi, m), phi, m) != g:
        _fail("measure.pr_phi_left_inverse", "Pr(g o phi) != g", measure=m, assign=dict(phi.assignment), g=g)


def law_pr_phi_divergence(rng, size, fault=False):
    from .examples import divergence_value
    n = 1 + size % 10
    if divergence_value(n) != n:
        _fail("measure.pr_phi_divergence", f"Pr(f_n) != n at n={n}", n=n)


# lifting ---------------------------------------------------------------------

def law_lifting_boolean(rng, size, fault=False):
    m = gen.random_measure(rng, max_atoms=min(5, size + 1), null_prob=0.4)
    L = make_lifting(m)
    atoms = m.space.atoms
    subsets = [frozenset(c) for r in range(len(atoms) + 1) for c in itertools.combinations(atoms, r)]
    lift = {A: frozenset(lift_set(L, A)) for A in subsets}
    full, null = frozenset(atoms), frozenset(m.null)
    if lift[frozenset()] != frozenset() or lift[full] != full:
        _fail("lifting.boolean_hom", "l(empty) or l(X) wrong", measure=m)
    for A in subsets:
        if A <= null and lift[A]:
            _fail("lifting.boolean_hom", "null set not sent to empty", measure=m, A=sorted(A))
        if m.of(A ^ lift[A]) != 0:
            _fail("lifting.boolean_hom", "m(A sym l(A)) != 0", measure=m, A=sorted(A))
        if lift[full - A] != full - lift[A]:
            _fail("lifting.boolean_hom", "complement not preserved", measure=m, A=sorted(A))
    for A, B in itertools.product(subsets, repeat=2):
        if lift[A & B] != lift[A] & lift[B] or lift[A ^ B] != lift[A] ^ lift[B]:
            _fail("lifting.boolean_hom", "meet or symmetric difference not preserved",
                  measure=m, A=sorted(A), B=sorted(B))


def law_lifting_functions(rng, size, fault=False):
    m = gen.random_measure(rng, max_atoms=min(8, size + 1), null_prob=0.4)
    L = make_lifting(m)
    f, g = gen.random_function(rng, m), gen.random_function(rng, m)
    c = gen.rational(rng)
    lf, lg = lift_function(L, f), lift_function(L, g)
    sp = m.space
    checks = {
        "i isometry": lf.sup() == abs(f).ess_sup(),
        "ii constants": lift_function(L, FunctionClass.constant(c, m)) == TotalFunction({x: c for x in sp}),
        "iii right inverse": project_class(lf, m) == f,
        "iv products": lift_function(L, f * g) == TotalFunction({x: lf[x] * lg[x] for x in sp}),
        "v modulus": lift_function(L, abs(f)) == TotalFunction({x: abs(lf[x]) for x in sp}),
        "linearity": lift_function(L, f + g * c) == TotalFunction({x: lf[x] + c * lg[x] for x in sp}),
    }
    h = abs(f) + g * 0
    hh = h + abs(g)
    lh, lhh = lift_function(L, h), lift_function(L, hh)
    checks["vi monotone"] = all(lh[x] <= lhh[x] for x in sp)
    for name, ok in checks.items():
        if not ok:
            _fail("lifting.function_laws", f"property {name} fails", measure=m, f=f, g=g)


def law_lifting_modules(rng, size, fault=False):
    M = gen.random_presentation(rng, max_atoms=size + 1, max_gens=3, null_prob=0.4)
    L = make_lifting(M.measure)
    lm = lift_module(L, M)
    v = gen.random_element(rng, M)
    f = gen.random_function(rng, M.measure)
    lv = lm.lift(v)
    n_lift = lm.norm(lv)
    target = lift_function(L, pointwise_norm(M, v))
    if any(not _close(n_lift[x], target[x]) for x in M.measure.space):
        _fail("lifting.module_laws", "|L(v)| != L(|v|)", presentation=M)
    lfv = lm.lift(v.scale(f))
    lf = lift_function(L, f)
    lhs, rhs = lm.norm(lfv), lm.norm(lv.scale(lf))
    if any(not _close(lhs[x], rhs[x]) or not lm.contains(lfv) for x in M.measure.space):
        _fail("lifting.module_laws", "L(f v) != L(f) L(v)", presentation=M)
    back = project_Pi_m(lm, lv)
    if not pointwise_norm(M, back - v).allclose(FunctionClass.constant(0, M.measure)):
        _fail("lifting.module_laws", "Pi(L(v)) != v", presentation=M)


def law_rx_isometry(rng, size, fault=False):
    M = gen.random_presentation(rng, max_atoms=size + 1, max_gens=4, null_prob=0.4)
    L = make_lifting(M.measure)
    primal, dual = lift_module(L, M), lift_module(L, dual_module(M))
    for x in M.measure.space:
        rep = rx_isometry_check(dual, primal, x, tol=1e-9)
        if not rep.ok:
            _fail("lifting.rx_isometry", f"defect {rep.max_defect} at {x}", presentation=M)
    om, v = gen.random_element(rng, dual.base), gen.random_element(rng, M)
    lo, lv = dual.lift(om), primal.lift(v)
    pair = lift_pairing(dual, lo, lv)
    no, nv = dual.norm(lo), primal.norm(lv)
    for x in M.measure.space:
        if not _le(abs(pair[x]), no[x] * nv[x], 1e-9):
            _fail("lifting.pairing", "|<w,v>| > |w||v|", presentation=M)


# modules ---------------------------------------------------------------------

def _maybe_faulty(M, fault):
    if not fault:
        return M
    return ModulePresentation(M.measure, M.gens, {x: FaultyNorm(f) for x, f in M.fibers.items()})


def law_ptwse_norm(rng, size, fault=False):
    M = _maybe_faulty(gen.random_presentation(rng, max_atoms=size + 1, max_gens=4), fault)
    v, w = gen.random_element(rng, M), gen.random_element(rng, M)
    f = gen.random_function(rng, M.measure)
    nv, nw, nvw = pointwise_norm(M, v), pointwise_norm(M, w), pointwise_norm(M, v + w)
    nfv = pointwise_norm(M, v.scale(f))
    for x in M.atoms:
        if nv[x] < 0:
            _fail("ptwse_norm.nonnegative", f"|v|({x}) < 0", presentation=M)
        if not _le(nvw[x], nv[x] + nw[x]):
            _fail("ptwse_norm.triangle", f"|v+w|({x}) > |v|({x}) + |w|({x})", presentation=M,
                  v=[c for c in v.coeffs], w=[c for c in w.coeffs])
    for x in M.atoms:
        if not _close(nfv[x], abs(f[x]) * nv[x]):
            _fail("ptwse_norm.homogeneity", f"|f v|({x}) != |f||v|({x})", presentation=M, f=f)


def _random_partition(rng, atoms):
    atoms = list(atoms)
    rng.shuffle(atoms)
    blocks, i = [], 0
    while i < len(atoms):
        j = rng.randint(i + 1, len(atoms))
        blocks.append(tuple(atoms[i:j]))
        i = j
    return blocks


def law_locality_glueing(rng, size, fault=False):
    M = gen.random_presentation(rng, max_atoms=size + 1, max_gens=4)
    blocks = _random_partition(rng, M.atoms)
    elems = [gen.random_element(rng, M) for _ in blocks]
    g = glue_elements(M, blocks, elems)
    zero = FunctionClass.constant(Fraction(0), M.measure)
    for blk, e in zip(blocks, elems):
        d = pointwise_norm(M, restrict_element(g, blk) - restrict_element(e, blk))
        if not d.allclose(zero):
            _fail("modules.glueing", "glued element differs from a part on its block", presentation=M)
    v = gen.random_element(rng, M)
    w = glue_elements(M, blocks, [restrict_element(v, b) + restrict_element(v, b).scale(0) for b in blocks])
    if not pointwise_norm(M, v - w).allclose(zero):
        _fail("modules.locality", "agreement on every block but |v - w| != 0", presentation=M)


def law_cr_roundtrip(rng, size, fault=False):
    M = gen.random_presentation(rng, max_atoms=size + 1, max_gens=4)
    els = [gen.random_element(rng, M) for _ in range(3)]
    rep = cr_roundtrip_check(M, els)
    if not (rep.bounded and rep.completion_equal and rep.restriction_equal and rep.max_discrepancy == 0):
        _fail("modules.cr_roundtrip", f"round trip discrepancy {rep.max_discrepancy}", presentation=M)


def law_dual_of_dual(rng, size, fault=False):
    M = gen.random_presentation(rng, max_atoms=size + 1, max_gens=3)
    DD = dual_module(dual_module(M))
    v = gen.random_element(rng, M)
    a, b = pointwise_norm(M, v), pointwise_norm(DD, v)
    if not a.allclose(b, 1e-9):
        _fail("modules.dual_of_dual", "bidual norm differs", presentation=M)


def law_rank_invariance(rng, size, fault=False):
    M = gen.random_presentation(rng, max_atoms=size + 1, max_gens=3)
    fibers = {}
    for x, f in M.fibers.items():
        while True:
            a = [tuple(Fraction(rng.randint(-2, 2)) for _ in range(M.gens)) for _ in range(M.gens)]
            from . import linalg
            if linalg.rank(a, M.gens) == M.gens:
                break
        fibers[x] = f.compose(a)
    N = ModulePresentation(M.measure, M.gens, fibers)
    if dimensional_decomposition(M).blocks != dimensional_decomposition(N).blocks:
        _fail("modules.rank_invariance", "decomposition changed under invertible recombination", presentation=M)


def law_pr_phi_modules(rng, size, fault=False):
    m_x = gen.random_measure(rng, max_atoms=size + 2, null_prob=0.2)
    phi, m_y = gen.random_map(rng, m_x)
    n = rng.randint(1, 3)
    M = ModulePresentation(m_y, n, {y: gen.random_fiber(rng, n) for y in m_y.positive})
    PM = pullback_module(phi, M, m_x)
    v = gen.random_element(rng, M)
    f = gen.random_function(rng, m_x)
    lhs = pr_phi_module(pullback_element(phi, v, m_x).scale(f), phi, M, m_x)
    pf = pr_phi_function(f, phi, m_x)
    if lhs != v.scale(pf):
        _fail("modules.pr_phi_mod1", "Pr(f phi*v) != Pr(f) v", measure=m_x, assign=dict(phi.assignment),
              presentation=M)
    if pr_phi_module(pullback_element(phi, v, m_x), phi, M, m_x) != v:
        _fail("modules.pr_phi_left_inverse", "Pr(phi*v) != v", measure=m_x, assign=dict(phi.assignment),
              presentation=M)
    w = gen.random_element(rng, PM)
    left = pointwise_norm(M, pr_phi_module(w, phi, M, m_x))
    right = pr_phi_function(pointwise_norm(PM, w), phi, m_x)
    for y in M.atoms:
        if not _le(left[y], right[y]):
            _fail("modules.pr_phi_mod2", f"|Pr(w)|({y}) > Pr(|w|)({y})", measure=m_x,
                  assign=dict(phi.assignment), presentation=M)


# norms and embedding ---------------------------------------------------------

def law_norming_functional(rng, size, fault=False):
    k = rng.randint(1, 4)
    N = gen.random_fiber(rng, k)
    v = tuple(gen.rational(rng) for _ in range(k))
    if N.norm(v) == 0:
        return
    nf = norming_functional(N, v)
    val = sum(float(a) * float(b) for a, b in zip(nf.omega, v))
    if not _close(dual_norm(N, nf.omega), 1, 1e-9) or not _close(val, N.norm(v), 1e-9):
        _fail("norms.norming_functional", "not a unit norming functional", fiber=N, v=list(v))


def law_embedding_defect(rng, size, fault=False):
    k = rng.randint(1, 4)
    N = gen.random_fiber(rng, k, rng.choice(("lp1", "lp2", "lpinf", "lp3", "polyhedral")))
    probes = [tuple(Fraction(int(i == j)) for i in range(k)) for j in range(k)]
    e = embed_fiber(N, probes, depth=10, resolution=64)
    nrng = np.random.default_rng(rng.getrandbits(32))
    for _ in range(20):
        v = tuple(nrng.standard_normal(k))
        d = e.measured_defect(v)
        if d > e.epsilon + 1e-12 or (e.net.exact and d > 1e-12):
            _fail("embedding.defect_certificate", f"measured {d} > certificate {e.epsilon}", fiber=N, v=list(v))


def law_retraction(rng, size, fault=False):
    d = rng.randint(1, 8)
    pts = [point_of(rng.randrange(1 << d), d) for _ in range(rng.randint(1, 6))]
    a = point_of(rng.randrange(1 << d), d)
    got = retract(a, pts)
    best = min(pts, key=lambda p: (cantor_metric(a, p), p))
    if got != best:
        _fail("embedding.retraction", "nearest point differs from brute force", a=list(a), image=[list(p) for p in pts])


# bundle ----------------------------------------------------------------------

def law_serre_swan(rng, size, fault=False):
    M = gen.random_presentation(rng, max_atoms=min(size + 1, 6), max_gens=3,
                                kinds=("lp1", "lpinf", "polyhedral", "lp2", "quadratic"))
    R = represent_module(M, depth=10, resolution=64)
    G, D = gamma_module(R.bundle)
    v = gen.random_element(rng, M)
    a, b = pointwise_norm(M, v), pointwise_norm(G, D.to_element(R.section(v)))
    for x in M.atoms:
        eps = R.report.atoms[x].certificate
        if not (_le(float(b[x]), float(a[x]), 1e-9) and float(b[x]) >= (1 - eps) * float(a[x]) - 1e-9):
            _fail("bundle.serre_swan", f"norm {b[x]} outside [(1-eps)|v|, |v|] at {x}", presentation=M)
    gb = graded_representation(M)
    c = gb.pointwise_norm(gb.coordinates(v))
    if c != a and not c.allclose(a, 1e-12):
        _fail("bundle.graded_exact", "graded path changes the pointwise norm", presentation=M)


def law_no_ac_monotone(rng, size, fault=False):
    M = gen.random_presentation(rng, max_atoms=min(size + 1, 4), max_gens=2)
    prev = math.inf
    for K in range(M.gens, M.gens + 5):
        d = represent_module_no_ac(M, K).report.max_defect
        if d < 0 or d > prev + 1e-9:
            _fail("bundle.no_ac_monotone", f"defect {d} at K={K} after {prev}", presentation=M)
        prev = d


def law_pullback_sections(rng, size, fault=False):
    m_x = gen.random_measure(rng, max_atoms=size + 2, null_prob=0.2)
    phi, m_y = gen.random_map(rng, m_x)
    n = rng.randint(1, 3)
    M = ModulePresentation(m_y, n, {y: gen.random_fiber(rng, n, rng.choice(gen.EXACT_KINDS)) for y in m_y.positive})
    R = represent_module(M, depth=8)
    rep = pullback_commute_check(R.bundle, phi, m_x, seed=rng.getrandbits(32))
    if not rep.ok:
        _fail("bundle.pullback_commute", f"residual {rep.residual}", presentation=M, assign=dict(phi.assignment))
    s = R.section(gen.random_element(rng, M))
    back = pr_phi_section(pullback_section(phi, s, m_x), phi, R.bundle, m_x)
    if not back.allclose(s, 1e-9):
        _fail("bundle.pr_phi_section", "Pr(phi*s) != s", presentation=M, assign=dict(phi.assignment))


LAWS = {
    "measure": [law_l0_metric, law_disintegration, law_pr_phi_functions, law_pr_phi_divergence],
    "lifting": [law_lifting_boolean, law_lifting_functions, law_lifting_modules, law_rx_isometry],
    "modules": [law_ptwse_norm, law_locality_glueing, law_cr_roundtrip, law_dual_of_dual, law_rank_invariance,
                law_pr_phi_modules],
    "norms": [law_norming_functional],
    "embedding": [law_embedding_defect, law_retraction],
    "bundle": [law_serre_swan, law_no_ac_monotone, law_pullback_sections],
}


def law_name(fn):
    return fn.__name__.removeprefix("law_")


@dataclass
class LawResult:
    name: str
    passed: int = 0
    failed: int = 0
    failure: LawViolation | None = None


@dataclass
class SuiteResult:
    results: list = field(default_factory=list)

    @property
    def ok(self):
        return all(r.failed == 0 for r in self.results)


MAX_SIZE = 6


def _shrink(fn, seed, size, fault, law):
    """Smallest-size instance violating the same law, if one turns up quickly."""
    for s in range(1, size):
        for t in range(20):
            try:
                fn(random.Random(f"{seed}:shrink:{s}:{t}"), s, fault)
            except LawViolation as exc:
                if exc.law == law:
                    return exc
    return None


def run_suite(suite="all", seed=42, cases=200, fault=False) -> SuiteResult:
    groups = LAWS if suite == "all" else {suite: LAWS[suite]}
    out = SuiteResult()
    for group, fns in groups.items():
        for fn in fns:
            res = LawResult(f"{group}.{law_name(fn)}")
            for i in range(cases):
                size = 1 + i % MAX_SIZE
                case_seed = f"{seed}:{res.name}:{i}"
                try:
                    fn(random.Random(case_seed), size, fault)
                    res.passed += 1
                except LawViolation as exc:
                    res.failed += 1
                    if res.failure is None:
                        res.failure = _shrink(fn, case_seed, size, fault, exc.law) or exc
            out.results.append(res)
    return out
