from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given

from conftest import rng, seeds
from fiberlib import generate as gen
from fiberlib.bundle import (Bundle, BundleMorphism, Section, SupAmbient, apply_section_functor,
                             bundle_from_sections, dense_section_family, embed_in_universal, faithfulness_witness,
                             gamma_module, graded_representation, morphism_from_module_map, pr_phi_section,
                             pullback_bundle, pullback_commute_check, pullback_section, reconstruct_section,
                             represent_module, represent_module_no_ac, universal_bundle)
from fiberlib.embedding import AmbientSpace
from fiberlib.errors import AbsoluteContinuityError, MembershipError
from fiberlib.measure import AtomSpace, FunctionClass, Measure, PointMap
from fiberlib.modules import ModuleMorphism, ModulePresentation, pointwise_norm, zero_fiber
from fiberlib.norms import Polyhedral, Quadratic, WeightedLp

AMB = SupAmbient(3)
E1, E2 = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])


def meas(**mass):
    return Measure.from_masses({k: F(v) for k, v in mass.items()})


def const(m, vec):
    return Section({x: vec for x in m.positive})


def weight_module():
    m = meas(a=F(1, 2), b=F(1, 2), c=0)
    return ModulePresentation(m, 1, {"a": WeightedLp(1, (1,)), "b": WeightedLp(1, (2,))})


def mixed_module():
    m = meas(a=1, b=1)
    return ModulePresentation(m, 2, {"a": WeightedLp(2, (1, 1)), "b": Quadratic(((1, 0), (0, 0)))})


def zero_module():
    m = meas(a=1, b=2)
    return ModulePresentation.uniform(m, zero_fiber(2))


def random_bundle(r, m, dim=4):
    g = np.random.default_rng(r.randrange(2**32))
    spans = {x: g.integers(-2, 3, size=(r.randint(0, 3), dim)).astype(float) for x in m.positive}
    return Bundle(m, SupAmbient(dim), spans)


def random_section(B, g):
    return Section({x: (g.integers(-3, 4, size=len(B.span(x))) @ B.span(x)) if len(B.span(x))
                    else B.ambient.zero() for x in B.atoms})


# bundles from sections

def test_bundle_from_sections_examples():
    m = meas(a=1, b=1)
    B = bundle_from_sections([const(m, E1)], m, AMB)
    assert all(B.fiber_dim(x) == 1 for x in B.atoms)
    assert B.contains(const(m, 2 * E1)) and not B.contains(const(m, E2))
    B = bundle_from_sections([const(m, E1), const(m, E2)], m, AMB)
    assert all(B.fiber_dim(x) == 2 for x in B.atoms)
    B = bundle_from_sections([const(m, E1), Section({"a": E2, "b": 0 * E2})], m, AMB)
    assert (B.fiber_dim("a"), B.fiber_dim("b")) == (2, 1)


def test_dense_family_examples():
    m = meas(a=1, b=1)
    B = bundle_from_sections([const(m, E1), const(m, E2)], m, AMB)
    fam = dense_section_family(B)
    assert fam[0].allclose(const(m, E1)) and fam[1].allclose(const(m, E2))
    Z = Bundle(m, AMB, {})
    assert dense_section_family(Z) == []


@given(seeds)
def test_random_section_reconstructed_from_family(seed):
    r = rng(seed)
    B = random_bundle(r, gen.random_measure(r))
    g = np.random.default_rng(seed)
    s = random_section(B, g)
    fam = dense_section_family(B)
    coeffs = reconstruct_section(B, fam, s)
    for x in B.atoms:
        rec = sum((float(c.values[x]) * f.values[x] for c, f in zip(coeffs, fam)), B.ambient.zero())
        assert np.allclose(rec, s.values[x], atol=1e-9)


def test_reconstruct_rejects_outside_sections():
    m = meas(a=1)
    B = bundle_from_sections([const(m, E1)], m, AMB)
    with pytest.raises(MembershipError):
        reconstruct_section(B, dense_section_family(B), const(m, E2))


# section functor

def test_gamma_examples():
    m = meas(a=1, b=1)
    M, _ = gamma_module(Bundle(m, AMB, {}))
    assert all(f.rank == 0 for f in M.fibers.values())
    B = bundle_from_sections([const(m, E1 + E2), Section({"a": E2, "b": 0 * E2})], m, AMB)
    M, d = gamma_module(B)
    s = Section({"a": np.array([3.0, -1, 0]), "b": np.array([2.0, 2, 0])})
    v = d.to_element(s)
    assert d.to_section(v).allclose(s)
    assert np.allclose([float(t) for t in pointwise_norm(M, v).values.values()],
                       [float(t) for t in B.section_norm(s).values.values()], atol=1e-12)


@given(seeds)
def test_gamma_dictionary_preserves_norm(seed):
    r = rng(seed)
    B = random_bundle(r, gen.random_measure(r))
    M, d = gamma_module(B)
    s = random_section(B, np.random.default_rng(seed))
    v = d.to_element(s)
    nv, ns = pointwise_norm(M, v), B.section_norm(s)
    for x in B.atoms:
        assert abs(float(nv.values[x]) - ns.values[x]) <= 1e-9 * max(1.0, ns.values[x])


# representation

def test_represent_weight_module():
    M = weight_module()
    rep = represent_module(M)
    assert all(rep.bundle.fiber_dim(x) == 1 for x in M.atoms)
    g = rep.generator_sections()[0]
    norms = rep.bundle.section_norm(g).values
    eps = rep.report.max_defect
    for x, w in (("a", 1), ("b", 2)):
        assert (1 - eps) * w - 1e-12 <= norms[x] <= w + 1e-12


def test_represent_mixed_rank():
    rep = represent_module(mixed_module(), depth=8, resolution=96)
    assert (rep.bundle.fiber_dim("a"), rep.bundle.fiber_dim("b")) == (2, 1)


def test_represent_zero_module():
    rep = represent_module(zero_module())
    assert rep.report.max_defect == 0
    assert all(rep.bundle.fiber_dim(x) == 0 for x in rep.module.atoms)


@given(seeds)
def test_serre_swan_round_trip(seed):
    r = rng(seed)
    M = gen.random_presentation(r, max_atoms=4, max_gens=3)
    rep = represent_module(M, depth=8, resolution=48)
    G, d = gamma_module(rep.bundle)
    eps = rep.report.max_defect
    for _ in range(3):
        v = gen.random_element(r, M)
        s = rep.section(v)
        w = d.to_element(s)
        nm, ng = pointwise_norm(M, v), pointwise_norm(G, w)
        for x in M.atoms:
            a, b = float(nm.values[x]), float(ng.values[x])
            assert (1 - eps) * a - 1e-9 <= b <= a + 1e-9
        assert rep.element(s) is not None


def test_represent_rejects_unmet_tolerance():
    m = meas(a=1)
    M = ModulePresentation.uniform(m, WeightedLp(2, (1, 1, 1)))
    from fiberlib.errors import EmbeddingError
    with pytest.raises(EmbeddingError):
        represent_module(M, depth=6, resolution=16, tol=1e-6)


# representation without a lifting

def test_no_ac_weight_module_is_exact():
    rep = represent_module_no_ac(weight_module(), 3)
    assert rep.report.max_defect == 0
    s = rep.generator_sections()[0]
    assert np.allclose(s["a"], 1) and np.allclose(s["b"], 2)


def test_no_ac_l1_with_all_vertices():
    m = meas(a=1)
    M = ModulePresentation.uniform(m, WeightedLp(1, (1, 1)))
    rep = represent_module_no_ac(M, 4)
    assert rep.report.max_defect == 0
    g = np.random.default_rng(0)
    for v in g.integers(-5, 6, size=(50, 2)):
        s = rep.section(M.element({"a": tuple(int(t) for t in v)}))
        assert rep.bundle.section_norm(s).values["a"] == pytest.approx(float(np.abs(v).sum()), abs=1e-12)


def test_no_ac_small_k_has_positive_defect():
    m = meas(a=1)
    M = ModulePresentation.uniform(m, WeightedLp(2, (1, 1)))
    d2 = represent_module_no_ac(M, 2).report.max_defect
    d6 = represent_module_no_ac(M, 6).report.max_defect
    assert 0 < d6 <= d2 <= 1
    with pytest.raises(ValueError):
        represent_module_no_ac(M, 1)


@given(seeds)
def test_no_ac_underestimates_norms(seed):
    r = rng(seed)
    M = gen.random_presentation(r, max_atoms=3, max_gens=3)
    rep = represent_module_no_ac(M, M.gens + 4)
    for _ in range(3):
        v = gen.random_element(r, M)
        n = pointwise_norm(M, v)
        s = rep.bundle.section_norm(rep.section(v))
        for x in M.atoms:
            d = rep.report.atoms[x].certificate
            assert (1 - d) * float(n.values[x]) - 1e-9 <= s.values[x] <= float(n.values[x]) + 1e-9


# morphisms

def test_morphism_identity_and_zero():
    M = mixed_module()
    rep = represent_module_no_ac(M, 6)
    ident = morphism_from_module_map(ModuleMorphism.identity(M), rep, rep)
    zero = morphism_from_module_map(ModuleMorphism(M, M, {x: ((0, 0), (0, 0)) for x in M.atoms}), rep, rep)
    for x in M.atoms:
        assert np.array_equal(ident.matrices[x], np.eye(2))
        assert not np.any(zero.matrices[x])
    s = rep.section(M.element({"a": (1, 2), "b": (3, 0)}))
    assert apply_section_functor(ident, s).allclose(s)
    assert apply_section_functor(zero, s).allclose(rep.bundle.zero_section())


def test_faithfulness_on_positive_atom():
    M = mixed_module()
    rep = represent_module_no_ac(M, 6)
    ident = morphism_from_module_map(ModuleMorphism.identity(M), rep, rep)
    half = BundleMorphism(rep.bundle, rep.bundle, {"a": np.eye(2), "b": np.eye(2) / 2})
    assert faithfulness_witness(ident, ident) is None
    assert faithfulness_witness(ident, half)[0] == "b"


@given(seeds)
def test_functoriality(seed):
    r = rng(seed)
    M = gen.random_presentation(r, max_atoms=4, max_gens=3, kinds=gen.EXACT_KINDS)
    rep = represent_module(M, depth=8)
    P, Q = gen.random_morphism(r, M, M), gen.random_morphism(r, M, M)
    p = BundleMorphism(rep.bundle, rep.bundle, {x: np.asarray(P.matrices[x], float) for x in M.atoms})
    q = BundleMorphism(rep.bundle, rep.bundle, {x: np.asarray(Q.matrices[x], float) for x in M.atoms})
    s = rep.section(gen.random_element(r, M))
    assert apply_section_functor(q.compose(p), s).allclose(apply_section_functor(q, apply_section_functor(p, s)),
                                                           tol=1e-8)
    assert q.compose(p).functor_image(M, M).matrices == {
        x: tuple(tuple(float(t) for t in row) for row in (np.asarray(Q.matrices[x], float)
                                                         @ np.asarray(P.matrices[x], float)).tolist())
        for x in M.atoms}


@given(seeds)
def test_section_functor_is_contractive(seed):
    r = rng(seed)
    M = gen.random_presentation(r, max_atoms=4, max_gens=3, kinds=gen.EXACT_KINDS)
    rep = represent_module(M, depth=8)
    assert rep.report.max_defect == 0
    Phi = gen.random_morphism(r, M, M)
    phi = morphism_from_module_map(Phi, rep, rep)
    s = rep.section(gen.random_element(r, M))
    out = apply_section_functor(phi, s)
    before, after = rep.bundle.section_norm(s), rep.bundle.section_norm(out)
    for x in M.atoms:
        assert after.values[x] <= before.values[x] + 1e-9
    assert rep.bundle.contains(out)


# pullbacks and projection

def test_pullback_identity_and_constant():
    m = meas(a=1, b=1)
    B = bundle_from_sections([const(m, E1), Section({"a": E2, "b": 0 * E2})], m, AMB)
    same = pullback_bundle(PointMap.identity(m.space), B, m)
    assert all(np.array_equal(same.span(x), B.span(x)) for x in m.positive)
    mx = meas(u=1, v=2, w=0)
    phi = PointMap(mx.space, m.space, {"u": "a", "v": "a", "w": "b"})
    pb = pullback_bundle(phi, B, mx)
    assert np.array_equal(pb.span("u"), pb.span("v")) and set(pb.atoms) == {"u", "v"}


def test_pullback_requires_absolute_continuity():
    m = meas(a=1, b=0)
    B = Bundle(m, AMB, {"a": [E1]})
    mx = meas(u=1)
    with pytest.raises(AbsoluteContinuityError):
        pullback_bundle(PointMap(mx.space, m.space, {"u": "b"}), B, mx)


def pb_instance(seed):
    r = rng(seed)
    m_x = gen.random_measure(r)
    phi, m_y = gen.random_map(r, m_x)
    return r, m_x, phi, random_bundle(r, m_y)


@given(seeds)
def test_pullback_norm_transport_and_commutation(seed):
    r, m_x, phi, B = pb_instance(seed)
    s = random_section(B, np.random.default_rng(seed))
    ps = pullback_section(phi, s, m_x)
    for x in m_x.positive:
        assert abs(B.ambient.norm(ps.values[x]) - B.ambient.norm(s.values[phi(x)])) <= 1e-12
    rep = pullback_commute_check(B, phi, m_x, seed=seed)
    assert rep.ok and rep.residual <= 1e-9
    assert pullback_commute_check(B, phi, m_x, sections=[ps]).residual <= 1e-9


def test_pr_phi_section_example():
    m_x = meas(a=1, b=3)
    m_y = meas(y=4)
    phi = PointMap(m_x.space, m_y.space, {"a": "y", "b": "y"})
    B = Bundle(m_y, AMB, {"y": [E1]})
    t = Section({"a": 4 * E1, "b": 0 * E1})
    assert np.allclose(pr_phi_section(t, phi, B, m_x)["y"], E1)


@given(seeds)
def test_pr_phi_section_laws(seed):
    r, m_x, phi, B = pb_instance(seed)
    g = np.random.default_rng(seed)
    s = random_section(B, g)
    assert pr_phi_section(pullback_section(phi, s, m_x), phi, B, m_x).allclose(s)
    pb = pullback_bundle(phi, B, m_x)
    t = random_section(pb, g)
    out = pr_phi_section(t, phi, B, m_x)
    assert B.contains(out)
    avg = pr_phi_section(Section({x: np.full(B.ambient.dim, B.ambient.norm(t.values[x])) for x in pb.atoms}),
                         phi, B, m_x)
    for y in B.atoms:
        assert B.ambient.norm(out.values[y]) <= avg.values[y][0] + 1e-12 if len(avg.values[y]) else True


# graded path

def test_graded_examples():
    G = graded_representation(weight_module())
    assert [b.dim for b in G.blocks] == [1]
    lam = {"a": (F(3),), "b": (F(-1, 2),)}
    assert G.pointwise_norm(lam) == FunctionClass({"a": 3, "b": 1})
    G = graded_representation(mixed_module())
    assert sorted((b.dim, b.atoms) for b in G.blocks) == [(1, ("b",)), (2, ("a",))]
    G = graded_representation(zero_module())
    assert [b.dim for b in G.blocks] == [0]


@given(seeds)
def test_graded_is_exact_and_agrees_with_embedding(seed):
    r = rng(seed)
    M = gen.random_presentation(r, max_atoms=4, max_gens=3)
    G = graded_representation(M)
    rep = represent_module(M, depth=8, resolution=48)
    eps = rep.report.max_defect
    v = gen.random_element(r, M)
    lam = G.coordinates(v)
    ng, nm = G.pointwise_norm(lam), pointwise_norm(M, v)
    ne = rep.bundle.section_norm(rep.section(v))
    for x in M.atoms:
        assert abs(float(ng.values[x]) - float(nm.values[x])) <= 1e-9 * max(1.0, float(nm.values[x]))
        assert (1 - eps) * float(nm.values[x]) - 1e-9 <= ne.values[x] <= float(nm.values[x]) + 1e-9


# universal bundle

def test_universal_bundle():
    M = weight_module()
    U, incl, rep = embed_in_universal(M, depth=6)
    assert all(U.fiber_dim(x) == 2**6 for x in U.atoms)
    g = np.random.default_rng(0)
    arbitrary = Section({x: g.standard_normal(2**6) for x in U.atoms})
    assert U.contains(arbitrary)
    v = M.element({"a": (F(3),), "b": (F(-1),)})
    s = incl(v)
    assert U.contains(s)
    eps = rep.report.max_defect
    n = pointwise_norm(M, v)
    for x in U.atoms:
        assert (1 - eps) * float(n.values[x]) - 1e-12 <= U.section_norm(s).values[x] <= float(n.values[x]) + 1e-12
    assert universal_bundle(M.measure, AmbientSpace(3)).to_json()["full"] is True


@given(seeds)
def test_no_ac_profile_matches_direct_representation(seed):
    from fiberlib.bundle import no_ac_defect_profile
    r = rng(seed)
    M = gen.random_presentation(r, max_atoms=3, max_gens=2)
    prof = no_ac_defect_profile(M, M.gens + 4)
    assert prof == [represent_module_no_ac(M, K).report.max_defect for K in range(M.gens, M.gens + 5)]
    assert all(b <= a + 1e-9 for a, b in zip(prof, prof[1:]))
