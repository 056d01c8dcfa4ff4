from fractions import Fraction as F

import pytest
from hypothesis import given

from conftest import rng, seeds
from fiberlib import generate as gen
from fiberlib.errors import PartitionError, ZeroMass
from fiberlib.measure import (AtomSpace, FunctionClass, Measure, PointMap, TotalFunction, compose_class,
                              disintegrate, glue_functions, l0_distance, measure_algebra_distance,
                              pr_phi_function, pr_phi_radon_nikodym, project_class, pushforward)


def m_of(**mass):
    return Measure.from_masses({k: F(v) for k, v in mass.items()})


def test_project_class_drops_null_atoms():
    m = m_of(a=1, b=0)
    assert project_class(TotalFunction({"a": 1, "b": 5}), m) == FunctionClass({"a": 1})


def test_project_class_constant_and_identity():
    m = m_of(a=1, b=1)
    assert project_class(TotalFunction({"a": 3, "b": 3}), m) == FunctionClass.constant(3, m)
    assert project_class(TotalFunction({"a": 2, "b": 4}), m) == FunctionClass({"a": 2, "b": 4})


def test_l0_distance_examples():
    m = m_of(a=1)
    f = FunctionClass({"a": F(0)})
    assert l0_distance(f, f, m) == 0
    assert l0_distance(f, FunctionClass({"a": F(1, 2)}), m) == F(1, 2)
    assert l0_distance(f, FunctionClass({"a": F(3)}), m) == 1


def test_measure_algebra_distance():
    m = m_of(a=1, b=1, c=0)
    assert measure_algebra_distance({"a"}, {"a"}, m) == 0
    assert measure_algebra_distance({"a"}, {"b"}, m) == 1
    assert measure_algebra_distance({"a", "c"}, {"a"}, m) == 0


def _abc():
    m = m_of(a=1, b=1, c=2)
    phi = PointMap(m.space, AtomSpace(("y1", "y2")), {"a": "y1", "b": "y1", "c": "y2"})
    return m, phi


def test_pushforward_examples():
    m, phi = _abc()
    assert pushforward(phi, m).mass == {"y1": 2, "y2": 2}
    assert pushforward(PointMap.identity(m.space), m) == m
    m2 = m_of(a=1, b=2)
    one = PointMap(m2.space, AtomSpace(("y",)), {"a": "y", "b": "y"})
    assert pushforward(one, m2).mass == {"y": 3}


def test_disintegration_examples():
    m, phi = _abc()
    d = disintegrate(phi, m)
    assert d.family["y1"] == {"a": F(1, 2), "b": F(1, 2), "c": 0}
    assert d.family["y2"] == {"a": 0, "b": 0, "c": 1}
    ident = disintegrate(PointMap.identity(m.space), m)
    assert all(ident.family[x][x] == 1 for x in m.space)


def test_disintegration_two_atoms_against_indicators():
    m = m_of(a=1, b=3)
    phi = PointMap(m.space, AtomSpace(("y",)), {"a": "y", "b": "y"})
    d = disintegrate(phi, m)
    assert d.family["y"] == {"a": F(1, 4), "b": F(3, 4)}
    for ia in (0, 1):
        for ib in (0, 1):
            f = {"a": ia, "b": ib}
            assert d.integrate(f, "y") * 4 == ia * 1 + ib * 3


def test_pr_phi_examples():
    m, phi = _abc()
    assert pr_phi_function(FunctionClass.constant(1, m), phi, m) == FunctionClass({"y1": 1, "y2": 1})
    f = FunctionClass({"a": F(4), "b": F(0), "c": F(5)})
    assert pr_phi_function(f, phi, m) == FunctionClass({"y1": 2, "y2": 5})
    assert pr_phi_radon_nikodym(f, phi, m) == FunctionClass({"y1": 2, "y2": 5})


def test_pr_phi_divergence_truncation():
    m = Measure.from_masses({"1": F(1, 2), "2": F(1, 4), "3": F(1, 8), "r": F(1, 8)})
    phi = PointMap(m.space, AtomSpace(("0",)), {x: "0" for x in m.space})
    f = FunctionClass({"1": F(2), "2": F(4), "3": F(8), "r": F(0)})
    assert pr_phi_function(f, phi, m).values["0"] == 3


def test_glue_functions():
    m = m_of(a=1, b=1, c=0)
    one, two = FunctionClass.constant(1, m), FunctionClass.constant(2, m)
    assert glue_functions([("a", "b")], [one], m) == one
    assert glue_functions([("a",), ("b",)], [one, two], m) == FunctionClass({"a": 1, "b": 2})
    assert glue_functions([("a", "b"), ("c",)], [one, two], m) == one
    with pytest.raises(PartitionError):
        glue_functions([("a",)], [one], m)
    with pytest.raises(PartitionError):
        glue_functions([("a", "b"), ("b",)], [one, two], m)


def test_zero_mass_rejected():
    with pytest.raises(ZeroMass):
        l0_distance(FunctionClass({}), FunctionClass({}), m_of(a=0))


@given(seeds)
def test_disintegration_identity_exact(seed):
    r = rng(seed)
    m = gen.random_measure(r, 7)
    phi, m_y = gen.random_map(r, m)
    d = disintegrate(phi, m)
    f = {x: gen.rational(r) for x in m.space}
    lhs = sum((f[x] * m.mass[x] for x in m.space), F(0))
    rhs = sum((d.integrate(f, y) * m_y.mass[y] for y in m_y.positive), F(0))
    assert lhs == rhs


@given(seeds)
def test_pr_phi_paths_agree_and_left_invert(seed):
    r = rng(seed)
    m = gen.random_measure(r, 7)
    phi, m_y = gen.random_map(r, m)
    f = gen.random_function(r, m)
    assert pr_phi_function(f, phi, m) == pr_phi_radon_nikodym(f, phi, m)
    g = FunctionClass({y: gen.rational(r) for y in m_y.positive})
    assert pr_phi_function(compose_class(g, phi, m), phi, m) == g


@given(seeds)
def test_l0_is_a_metric(seed):
    r = rng(seed)
    m = gen.random_measure(r, 6)
    f, g, h = (gen.random_function(r, m) for _ in range(3))
    assert l0_distance(f, g, m) == l0_distance(g, f, m)
    assert l0_distance(f, h, m) <= l0_distance(f, g, m) + l0_distance(g, h, m)


@given(seeds)
def test_project_class_is_a_ring_map(seed):
    r = rng(seed)
    m = gen.random_measure(r, 6)
    f = TotalFunction({x: gen.rational(r) for x in m.space})
    g = TotalFunction({x: gen.rational(r) for x in m.space})
    pf, pg = project_class(f, m), project_class(g, m)
    assert project_class(TotalFunction({x: f[x] + g[x] for x in m.space}), m) == pf + pg
    assert project_class(TotalFunction({x: f[x] * g[x] for x in m.space}), m) == pf * pg
