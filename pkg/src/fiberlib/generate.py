"""Seeded random instances with rational data, for tests and the law runner."""
from __future__ import annotations

import math
import random
from fractions import Fraction

from . import linalg
from .measure import AtomSpace, FunctionClass, Measure, PointMap
from .modules import ModuleElement, ModuleMorphism, ModulePresentation
from .norms import INF, Polyhedral, Quadratic, WeightedLp, contraction_check

KINDS = ("lp1", "lp2", "lpinf", "lp3", "polyhedral", "quadratic")
EXACT_KINDS = ("lp1", "lpinf", "polyhedral")


def rng_of(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def rational(rng, lo=-3, hi=3, dens=(1, 2, 3, 4)) -> Fraction:
    d = rng.choice(dens)
    return Fraction(rng.randint(lo * d, hi * d), d)


def positive_rational(rng, hi=3, dens=(1, 2, 3, 4)) -> Fraction:
    d = rng.choice(dens)
    return Fraction(rng.randint(1, hi * d), d)


def atom_names(n, prefix="x"):
    return tuple(f"{prefix}{i}" for i in range(n))


def random_measure(rng, max_atoms=6, null_prob=0.3, prefix="x", min_atoms=1) -> Measure:
    n = rng.randint(min_atoms, max_atoms)
    atoms = atom_names(n, prefix)
    mass = {a: (Fraction(0) if rng.random() < null_prob else positive_rational(rng)) for a in atoms}
    if all(v == 0 for v in mass.values()):
        mass[rng.choice(atoms)] = positive_rational(rng)
    return Measure(AtomSpace(atoms), mass)


def random_function(rng, m: Measure) -> FunctionClass:
    return FunctionClass({a: rational(rng) for a in m.positive})


def random_fiber(rng, k, kind=None, kernel_prob=0.3):
    kind = kind or rng.choice(KINDS)
    if kind.startswith("lp"):
        p = {"lp1": 1, "lp2": 2, "lpinf": INF, "lp3": 3}[kind]
        w = [Fraction(0) if rng.random() < kernel_prob / 2 else positive_rational(rng) for _ in range(k)]
        return WeightedLp(p, tuple(w))
    if kind == "polyhedral":
        nrows = rng.randint(1, k + 2) if rng.random() < kernel_prob else rng.randint(k, k + 2)
        rows = []
        while len(rows) < nrows:
            r = tuple(Fraction(rng.randint(-2, 2)) for _ in range(k))
            if any(r):
                rows.append(r)
        return Polyhedral(tuple(rows))
    if kind == "quadratic":
        r = rng.randint(1, k) if rng.random() < kernel_prob else k
        a = [tuple(Fraction(rng.randint(-2, 2)) for _ in range(k)) for _ in range(r)]
        q = linalg.matmul(linalg.transpose(a), a)
        if all(x == 0 for row in q for x in row):
            q = linalg.identity(k)
        return Quadratic(q)
    raise ValueError(f"unknown fiber kind {kind!r}")


def random_presentation(rng, max_atoms=6, max_gens=4, kinds=KINDS, null_prob=0.3, gens=None,
                        uniform_kind=False) -> ModulePresentation:
    m = random_measure(rng, max_atoms, null_prob)
    n = gens or rng.randint(1, max_gens)
    kind = rng.choice(kinds) if uniform_kind else None
    fibers = {a: random_fiber(rng, n, kind or rng.choice(kinds)) for a in m.positive}
    return ModulePresentation(m, n, fibers)


def random_element(rng, M: ModulePresentation) -> ModuleElement:
    return M.element({a: tuple(rational(rng) for _ in range(M.gens)) for a in M.atoms})


def random_map(rng, m_x: Measure, max_targets=4, prefix="y"):
    """Random map onto a fresh space with the pushforward measure, plus that measure."""
    from .measure import pushforward

    ny = rng.randint(1, max_targets)
    target = AtomSpace(atom_names(ny, prefix))
    phi = PointMap(m_x.space, target, {x: rng.choice(target.atoms) for x in m_x.space})
    return phi, pushforward(phi, m_x)


def _scale_to_contraction(mat, src, dst):
    rep = contraction_check(mat, src, dst, tol=0.0)
    if math.isinf(rep.defect):
        raise ValueError("matrix does not respect kernels")
    op = 1 + max(rep.defect, 0.0)
    if op <= 1:
        return mat
    s = Fraction(1000, math.ceil(op * 1000) + 1)
    return tuple(tuple(x * s for x in r) for r in mat)


def random_morphism(rng, src: ModulePresentation, dst: ModulePresentation) -> ModuleMorphism:
    """Random contraction src -> dst killing the source kernels."""
    mats = {}
    for x in src.atoms:
        fs, fd = src.fibers[x], dst.fibers[x]
        b = [tuple(rational(rng, -2, 2) for _ in range(src.gens)) for _ in range(dst.gens)]
        ker = fs.kernel_basis()
        if ker and fs.exact() and all(all(isinstance(t, Fraction) for t in v) for v in ker):
            p = fs.quotient_projector()
            b = linalg.matmul(b, p)
        elif ker:
            b = [tuple(Fraction(0) for _ in range(src.gens)) for _ in range(dst.gens)]
        mats[x] = _scale_to_contraction(b, fs, fd)
    return ModuleMorphism(src, dst, mats)
