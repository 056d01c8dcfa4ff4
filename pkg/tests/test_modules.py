from fractions import Fraction as F

import pytest
from hypothesis import given

from conftest import rng, seeds
from fiberlib import generate as gen
from fiberlib.errors import PartitionError, RankError
from fiberlib.measure import AtomSpace, FunctionClass, Measure, PointMap
from fiberlib.modules import (ModulePresentation, chain_inclusion, cr_roundtrip_check, dimensional_decomposition,
                              direct_limit_chain, dual_module, extend_element, glue_elements, local_basis,
                              local_basis_indices, localize_element, localize_extend, nested_chain, pairing,
                              pointwise_norm, pr_phi_module, pullback_element, pullback_module, restrict_element,
                              zero_fiber)
from fiberlib.norms import INF, Polyhedral, Quadratic, WeightedLp


def meas(**mass):
    return Measure.from_masses({k: F(v) for k, v in mass.items()})


def test_pointwise_norm_examples():
    m = meas(a=1, b=1)
    M = ModulePresentation(m, 1, {"a": WeightedLp(1, (1,)), "b": WeightedLp(1, (2,))})
    assert pointwise_norm(M, M.zero()) == FunctionClass.constant(0, m)
    v = M.element({"a": (3,), "b": (3,)})
    assert pointwise_norm(M, v) == FunctionClass({"a": 3, "b": 6})
    L1 = ModulePresentation.uniform(m, WeightedLp(1, (1, 1)))
    assert pointwise_norm(L1, L1.element({"a": (1, -1), "b": (1, -1)})) == FunctionClass.constant(2, m)


def test_glue_elements_examples():
    m = meas(a=1, b=1)
    M = ModulePresentation.uniform(m, WeightedLp(2, (1, 1)))
    v1 = M.element({"a": (1, 2), "b": (3, 4)})
    v2 = M.element({"a": (5, 6), "b": (7, 8)})
    assert glue_elements(M, [("a", "b")], [v1]) == v1
    assert glue_elements(M, [("a",), ("b",)], [v1, v2]).at("b") == (7, 8)
    assert glue_elements(M, [("a",), ("b",)], [restrict_element(v1, ("a",)), restrict_element(v1, ("b",))]) == v1
    with pytest.raises(PartitionError):
        glue_elements(M, [("a",)], [v1])


def test_cr_roundtrip_examples():
    m = meas(a=1, b=2, c=0)
    M = ModulePresentation(m, 2, {"a": WeightedLp(2, (1, 1)), "b": Polyhedral(((1, 1),))})
    rep = cr_roundtrip_check(M)
    assert rep.bounded and rep.completion_equal and rep.restriction_equal and rep.max_discrepancy == 0


def test_dual_module_examples():
    m = meas(a=1, b=1)
    M = ModulePresentation(m, 2, {"a": WeightedLp(2, (1, 1)), "b": WeightedLp(1, (1, 1))})
    D = dual_module(M)
    assert D.fibers["a"] == WeightedLp(2, (1, 1))
    assert D.fibers["b"] == WeightedLp(INF, (1, 1))
    Z = ModulePresentation.uniform(m, zero_fiber(2))
    assert all(f.rank == 0 for f in dual_module(Z).fibers.values())


def test_dimensional_decomposition_examples():
    m = meas(a=1, b=1)
    assert dimensional_decomposition(ModulePresentation.uniform(m, WeightedLp(2, (1, 1)))).block(2) == ("a", "b")
    M = ModulePresentation(m, 2, {"a": WeightedLp(2, (1, 1)), "b": Quadratic(((1, 0), (0, 0)))})
    dec = dimensional_decomposition(M)
    assert dec.block(2) == ("a",) and dec.block(1) == ("b",)
    assert dimensional_decomposition(ModulePresentation.uniform(m, zero_fiber(2))).block(0) == ("a", "b")


def test_local_basis_examples():
    m = meas(a=1, b=1)
    M = ModulePresentation.uniform(m, WeightedLp(2, (1, 1)))
    assert len(local_basis(M, ("a", "b"))) == 2
    dup = ModulePresentation.uniform(m, Polyhedral(((1, 1, 0), (0, 0, 1))))
    assert local_basis_indices(dup, ("a", "b")) == {"a": (0, 2), "b": (0, 2)}
    Z = ModulePresentation.uniform(m, zero_fiber(2))
    assert local_basis(Z, ("a", "b")) == []
    mixed = ModulePresentation(m, 2, {"a": WeightedLp(2, (1, 1)), "b": Quadratic(((1, 0), (0, 0)))})
    with pytest.raises(RankError):
        local_basis(mixed, ("a", "b"))


def test_nested_chain_examples():
    m = meas(a=1, b=1)
    M = ModulePresentation(m, 2, {"a": WeightedLp(2, (1, 1)), "b": Polyhedral(((1, 0), (1, 1)))})
    chain = nested_chain(M)
    assert [c.presentation.gens for c in chain] == [1, 2]
    assert all(c.presentation.rank_at(x) == n + 1 for n, c in enumerate(chain) for x in m.positive)
    first = chain[0].inclusion(chain[0].presentation.generator(0))
    assert all(v > 0 for v in pointwise_norm(M, first).values.values())
    R1 = ModulePresentation(m, 2, {"a": Quadratic(((0, 0), (0, 1))), "b": WeightedLp(1, (1, 0))})
    one = nested_chain(R1)
    assert len(one) == 1
    g = one[0].inclusion(one[0].presentation.generator(0))
    assert g.at("a") == (0, 1) and g.at("b") == (1, 0)


def test_direct_limit_examples():
    m = meas(a=1, b=1)
    M = ModulePresentation(m, 2, {"a": WeightedLp(2, (1, 1)), "b": WeightedLp(1, (1, 2))})
    chain = [c.presentation for c in nested_chain(M)]
    incs = [chain_inclusion(chain[0], chain[1])]
    lim = direct_limit_chain(chain, incs)
    assert lim.module is chain[-1]
    const = direct_limit_chain([M, M], [chain_inclusion(M, M)])
    assert const.module is M
    maps = [leg for leg in lim.legs]
    assert lim.factor(maps).matrices == lim.legs[-1].matrices


def test_localize_extend_examples():
    m = meas(a=1, b=2, c=0)
    M = ModulePresentation(m, 2, {"a": WeightedLp(2, (1, 1)), "b": WeightedLp(1, (1, 1))})
    loc, ext = localize_extend(M, ("a", "b"))
    assert loc.fibers == M.fibers
    single, ext1 = localize_extend(M, ("b",))
    assert single.atoms == ("b",)
    v = M.element({"a": (3, 4), "b": (1, -1)})
    back = extend_element(localize_element(v, single), ext1)
    assert pointwise_norm(ext1, back) == FunctionClass({"a": 0, "b": 2})


def _ymap():
    m_x = meas(u=1, v=3, w=2)
    m_y = meas(y=4, z=2)
    phi = PointMap(m_x.space, m_y.space, {"u": "y", "v": "y", "w": "z"})
    return m_x, m_y, phi


def test_pullback_examples():
    m_x, m_y, phi = _ymap()
    M = ModulePresentation(m_y, 1, {"y": WeightedLp(1, (2,)), "z": WeightedLp(1, (5,))})
    ident = PointMap.identity(m_y.space)
    assert pullback_module(ident, M, m_y).fibers == M.fibers
    const = PointMap(m_x.space, m_y.space, {x: "y" for x in m_x.space})
    assert all(f == M.fibers["y"] for f in pullback_module(const, M, m_x).fibers.values())
    v = M.element({"y": (3,), "z": (-1,)})
    PM = pullback_module(phi, M, m_x)
    assert pointwise_norm(PM, pullback_element(phi, v, m_x)).values == {"u": 6, "v": 6, "w": 5}


def test_pr_phi_module_examples():
    m_x, m_y, phi = _ymap()
    M = ModulePresentation.uniform(m_y, WeightedLp(1, (1,)))
    v = M.element({"y": (3,), "z": (-1,)})
    assert pr_phi_module(pullback_element(phi, v, m_x), phi, M, m_x) == v
    PM = pullback_module(phi, M, m_x)
    t = PM.element({"u": (4,), "v": (0,), "w": (0,)})
    assert pr_phi_module(t, phi, M, m_x).at("y") == (1,)


def test_pairing_is_bounded_by_norms():
    m = meas(a=1)
    M = ModulePresentation.uniform(m, WeightedLp(1, (1, 1)))
    D = dual_module(M)
    om, v = D.element({"a": (1, -1)}), M.element({"a": (2, -3)})
    assert pairing(M, om, v).values["a"] == 5
    assert pointwise_norm(D, om).values["a"] * pointwise_norm(M, v).values["a"] >= 5


@given(seeds)
def test_pointwise_norm_laws(seed):
    r = rng(seed)
    M = gen.random_presentation(r, 5, 4)
    v, w = gen.random_element(r, M), gen.random_element(r, M)
    f = gen.random_function(r, M.measure)
    nv, nw, nvw = pointwise_norm(M, v), pointwise_norm(M, w), pointwise_norm(M, v + w)
    nfv = pointwise_norm(M, v.scale(f))
    for x in M.atoms:
        assert nv[x] >= 0
        assert float(nvw[x]) <= float(nv[x]) + float(nw[x]) + 1e-12
        assert abs(float(nfv[x]) - abs(float(f[x])) * float(nv[x])) <= 1e-12 * max(1.0, float(nfv[x]))


@given(seeds)
def test_locality(seed):
    r = rng(seed)
    M = gen.random_presentation(r, 5, 3)
    v = gen.random_element(r, M)
    atoms = list(M.atoms)
    cut = r.randint(0, len(atoms))
    blocks = [tuple(atoms[:cut]), tuple(atoms[cut:])]
    blocks = [b for b in blocks if b]
    w = glue_elements(M, blocks, [v for _ in blocks])
    assert all(n == 0 for n in pointwise_norm(M, v - w).values.values())


@given(seeds)
def test_rank_invariance_under_recombination(seed):
    r = rng(seed)
    M = gen.random_presentation(r, 5, 3, kinds=("lp2", "lp1", "lpinf", "polyhedral", "quadratic"))
    from fiberlib import linalg

    while True:
        a = [tuple(F(r.randint(-2, 2)) for _ in range(M.gens)) for _ in range(M.gens)]
        if linalg.rank(a, M.gens) == M.gens:
            break
    N = ModulePresentation(M.measure, M.gens, {x: f.compose(a) for x, f in M.fibers.items()})
    assert dimensional_decomposition(M).blocks == dimensional_decomposition(N).blocks


@given(seeds)
def test_pullback_then_project_is_identity(seed):
    r = rng(seed)
    m_x = gen.random_measure(r, 6, null_prob=0.2)
    phi, m_y = gen.random_map(r, m_x)
    M = ModulePresentation(m_y, 2, {y: gen.random_fiber(r, 2) for y in m_y.positive})
    v = gen.random_element(r, M)
    assert pr_phi_module(pullback_element(phi, v, m_x), phi, M, m_x) == v
    PM = pullback_module(phi, M, m_x)
    pv = pointwise_norm(PM, pullback_element(phi, v, m_x))
    nv = pointwise_norm(M, v)
    assert all(pv[x] == nv[phi(x)] for x in m_x.positive)


@given(seeds)
def test_dual_of_dual(seed):
    r = rng(seed)
    M = gen.random_presentation(r, 4, 3)
    DD = dual_module(dual_module(M))
    v = gen.random_element(r, M)
    assert pointwise_norm(M, v).allclose(pointwise_norm(DD, v), 1e-9)
