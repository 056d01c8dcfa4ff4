import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rng, seeds
from fiberlib import generate as gen
from fiberlib.embedding import (AmbientSpace, CollectionEntry, build_functional_net, cantor_metric, code_of,
                                embed_collection, embed_fiber, point_of, psi_preimage_code, psi_surjection,
                                retract)
from fiberlib.errors import DimensionMismatch, EmbeddingError
from fiberlib.norms import INF, Polyhedral, Quadratic, WeightedLp, dual_norm, norming_functional


def unit(k):
    return [tuple(F(int(i == j)) for i in range(k)) for j in range(k)]


def brute_retract(a, image):
    return min(image, key=lambda p: (cantor_metric(a, p), p))


def test_cantor_metric_examples():
    assert cantor_metric((0, 2, 0), (0, 2, 0)) == 0
    assert cantor_metric((0, 2, 0), (2, 2, 0)) == F(2, 3)
    assert cantor_metric((0, 0), (2, 2)) == F(8, 9)
    with pytest.raises(DimensionMismatch):
        cantor_metric((0,), (0, 0))


def test_psi_examples():
    assert psi_surjection((0,) * 6, 3) == (-1, -1, -1)
    d, k = 7, 3
    vals = psi_surjection((2,) * d, k)
    assert vals == psi_surjection((2,) * d, k)
    assert all(v >= 1 - F(2) ** (1 - d // k) for v in vals)
    assert all(v < 1 for v in vals)


def test_psi_preimage_inverts_on_grid():
    d, k = 8, 3
    for code in range(1 << d):
        a = point_of(code, d)
        assert psi_preimage_code(psi_surjection(a, k), d) == code


def test_retract_examples():
    img = [(0, 2, 0), (2, 0, 2)]
    assert retract((0, 2, 0), img) == (0, 2, 0)
    assert retract((2, 2, 2), [(0, 0, 0)]) == (0, 0, 0)
    assert retract((0, 2, 2), [(0, 2, 0), (0, 2, 0)]) == (0, 2, 0)
    with pytest.raises(ValueError):
        retract((0,), [])


def test_distinct_points_are_never_equidistant():
    # the lexicographic tie-break can only ever see duplicate points
    for d in range(1, 7):
        pts = [point_of(c, d) for c in range(1 << d)]
        for a in pts:
            dists = [cantor_metric(a, p) for p in pts]
            assert len(set(dists)) == len(dists)


@given(st.integers(1, 8), seeds)
def test_retract_matches_brute_force(d, seed):
    r = rng(seed)
    image = [point_of(r.randrange(1 << d), d) for _ in range(r.randint(1, 10))]
    for code in range(1 << d):
        a = point_of(code, d)
        got = retract(a, image)
        assert got == brute_retract(a, image)
        assert retract(got, image) == got


def test_retract_exhaustive_small_images():
    d = 4
    pts = [point_of(c, d) for c in range(1 << d)]
    for image in itertools.combinations(pts, 2):
        for a in pts:
            assert retract(a, list(image)) == brute_retract(a, image)


def test_net_examples():
    net = build_functional_net(WeightedLp(2, (1,)), unit(1), 8)
    assert sorted(net.functionals[:, 0].tolist()) == [-1.0, 1.0] and net.covering_radius == 0
    net = build_functional_net(WeightedLp(1, (1, 1)), unit(2), 8)
    assert sorted(map(tuple, net.functionals.tolist())) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    assert net.exact and net.defect_bound == 0
    net = build_functional_net(WeightedLp(2, (1, 1)), unit(2), 360)
    assert net.covering_radius <= math.pi / 360


def test_net_functionals_are_in_dual_ball():
    for n in (WeightedLp(2, (1, 2, 3)), WeightedLp(3, (1, 1)), Quadratic(((2, 1), (1, 2))), Polyhedral(((1, 2), (0, 1)))):
        net = build_functional_net(n, unit(n.dim), 32)
        for w in net.functionals:
            assert float(dual_norm(n, tuple(w))) <= 1 + 1e-12
        assert np.all(np.abs(net.iota) <= 1 + 1e-12)


def test_degenerate_probes_rejected():
    with pytest.raises(EmbeddingError):
        build_functional_net(WeightedLp(2, (1, 1)), [(1, 0)], 16)


def test_embed_examples():
    e = embed_fiber(WeightedLp(2, (1,)), unit(1))
    assert np.all(e((0,)) == 0)
    assert e.sup_norm((2,)) == 2 and e.epsilon == 0
    e = embed_fiber(WeightedLp(1, (1, 2)), unit(2))
    u, v = (F(1), F(-2)), (F(3), F(1, 2))
    assert np.array_equal(e(tuple(a + b for a, b in zip(u, v))), e(u) + e(v))


def test_unsatisfiable_tolerance_is_reported():
    with pytest.raises(EmbeddingError):
        embed_fiber(WeightedLp(2, (1, 1, 1)), unit(3), depth=6, resolution=16, tol=1e-6)


def test_polyhedral_full_vertex_net_is_exactly_isometric():
    n = Polyhedral(((1, 0, 0), (1, 1, 0), (0, 1, 1), (1, -1, 2)))
    e = embed_fiber(n, unit(3))
    r = rng(0)
    for _ in range(200):
        v = tuple(gen.rational(r) for _ in range(3))
        assert e.sup_norm(v) == float(n.norm(v))


@given(seeds, st.sampled_from(["lp1", "lp2", "lpinf", "lp3", "polyhedral", "quadratic"]))
def test_defect_within_certificate(seed, kind):
    r = rng(seed)
    k = r.randint(1, 4)
    n = gen.random_fiber(r, k, kind)
    e = embed_fiber(n, unit(k))
    vs = np.random.default_rng(seed).standard_normal((50, k))
    for v in vs:
        nv = float(n.norm(tuple(v)))
        s = e.sup_norm(tuple(v))
        assert s <= nv * (1 + 1e-12) + 1e-12
        assert s >= (1 - e.epsilon) * nv - 1e-12


def test_collection_examples():
    n = WeightedLp(1, (1, 2))
    probes = tuple(unit(2))
    norming = tuple(norming_functional(n, p).omega for p in probes)
    single = embed_collection({"a": CollectionEntry(n, probes, norming)})
    direct = embed_fiber(n, probes, extra=norming)
    assert np.array_equal(single.handles["a"]((1, 1)), direct((1, 1)))
    two = embed_collection({"a": CollectionEntry(n, probes, norming), "b": CollectionEntry(n, probes, norming)})
    assert np.array_equal(two.handles["a"].table, two.handles["b"].table)
    assert isinstance(two.ambient, AmbientSpace)


def test_collection_rejects_inconsistent_probes():
    n = WeightedLp(1, (1, 2))
    entry = CollectionEntry(n, tuple(unit(2)), tuple(norming_functional(n, p).omega for p in unit(2)))
    bad = CollectionEntry(n, tuple(unit(2)) + ((F(1), F(1)),), entry.norming)
    with pytest.raises(EmbeddingError):
        embed_collection({"a": entry, "b": bad})


@given(seeds)
def test_collection_image_dimension_is_fiber_rank(seed):
    r = rng(seed)
    k = r.randint(1, 4)
    n = gen.random_fiber(r, k)
    probes = tuple(unit(k))
    norming = tuple(norming_functional(n, p).omega if n.norm(p) else (0,) * k for p in probes)
    col = embed_collection({"a": CollectionEntry(n, probes, norming)}, depth=8)
    images = np.asarray([col.handles["a"](p) for p in probes])
    assert np.linalg.matrix_rank(images, tol=1e-9) == n.rank


@pytest.mark.parametrize("fiber", [WeightedLp(2, (1, 2)), WeightedLp(2, (1, 1, 3)), Quadratic(((2, 1), (1, 2))),
                                   WeightedLp(3, (1, 1))])
def test_parameters_meet_tolerance(fiber):
    from fiberlib.embedding import parameters_for_tolerance
    depth, res = parameters_for_tolerance([fiber], 1e-2, extra=fiber.dim)
    e = embed_fiber(fiber, unit(fiber.dim), depth=depth, resolution=res, tol=1e-2)
    assert e.epsilon <= 1e-2


def test_parameters_for_exact_nets_are_small():
    from fiberlib.embedding import parameters_for_tolerance
    assert parameters_for_tolerance([WeightedLp(1, (1, 1, 1))], 1e-9) == (3, 4)
    with pytest.raises(EmbeddingError):
        parameters_for_tolerance([WeightedLp(2, (1, 1, 1, 1))], 1e-9, max_depth=20)
