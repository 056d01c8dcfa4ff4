"""Banach-Mazur embeddings at finite Cantor depth.

The ambient space is C(Delta_d): real functions on the 2^d Cantor points of
depth d with the sup norm.  A fiber (R^k, seminorm) is embedded by choosing a
finite net of dual-unit-ball functionals, planting each one at a Cantor
address obtained from its probe coordinates through the inverse of psi, and
evaluating at every address the functional planted at its retraction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import kernels, linalg
from ._num import all_exact, dot
from .errors import DimensionMismatch, EmbeddingError
from .norms import INF, FiberNorm, WeightedLp, conjugate_exponent, is_ellipsoidal

DEFAULT_DEPTH = 10
DEFAULT_RESOLUTION = 64


def _check_digits(a):
    a = tuple(a)
    if any(d not in (0, 2) for d in a):
        raise ValueError("Cantor digits must be 0 or 2")
    return a


def code_of(a) -> int:
    """Integer code of a Cantor point: first digit is the most significant bit."""
    code = 0
    for d in _check_digits(a):
        code = (code << 1) | (d >> 1)
    return code


def point_of(code: int, depth: int) -> tuple:
    return tuple(2 * ((code >> (depth - 1 - n)) & 1) for n in range(depth))


def cantor_metric(a, b) -> Fraction:
    a, b = _check_digits(a), _check_digits(b)
    if len(a) != len(b):
        raise DimensionMismatch("Cantor points of different depth")
    return sum((Fraction(abs(x - y), 3 ** (n + 1)) for n, (x, y) in enumerate(zip(a, b))), Fraction(0))


def _bits_per_coordinate(depth, k):
    return [len(range(j, depth, k)) for j in range(k)]


def psi_surjection(a, k: int) -> tuple:
    """Map a Cantor point into [-1, 1]^k, dealing digits round-robin to coordinates."""
    a = _check_digits(a)
    out = []
    for j in range(k):
        bits = [d >> 1 for d in a[j::k]]
        val = sum((Fraction(b, 2 ** (i + 1)) for i, b in enumerate(bits)), Fraction(0))
        out.append(2 * val - 1)
    return tuple(out)


def psi_preimage_codes(alphas, depth: int) -> np.ndarray:
    """Addresses whose psi images are the grid points closest to each row of ``alphas``."""
    alphas = np.atleast_2d(np.asarray(alphas, dtype=float))
    n, k = alphas.shape
    codes = np.zeros(n, dtype=np.int64)
    if k == 0:
        return codes
    nbits = _bits_per_coordinate(depth, k)
    qs = []
    for j in range(k):
        top = 2 ** nbits[j]
        q = np.rint((alphas[:, j] + 1) / 2 * top).astype(np.int64)
        qs.append(np.clip(q, 0, top - 1))
    for pos in range(depth):
        j, i = pos % k, pos // k
        codes |= ((qs[j] >> (nbits[j] - 1 - i)) & 1) << (depth - 1 - pos)
    return codes


def psi_preimage_code(alpha, depth: int) -> int:
    return int(psi_preimage_codes([alpha], depth)[0])


def retract(a, k_image) -> tuple:
    """Nearest point of ``k_image`` to ``a`` in the Cantor metric (lexicographic on ties)."""
    a = _check_digits(a)
    if not k_image:
        raise ValueError("retraction target must be non-empty")
    depth = len(a)
    codes = sorted({code_of(p) for p in k_image})
    if any(len(p) != depth for p in k_image):
        raise DimensionMismatch("Cantor points of different depth")
    idx = kernels.nearest_index(code_of(a), np.asarray(codes, dtype=np.int64), depth)
    return point_of(codes[idx], depth)


@dataclass(frozen=True)
class AmbientSpace:
    depth: int

    @property
    def dim(self) -> int:
        return 1 << self.depth

    @property
    def points(self):
        return [point_of(c, self.depth) for c in range(self.dim)]

    def norm(self, vec) -> float:
        vec = np.asarray(vec, dtype=float)
        return float(np.abs(vec).max()) if vec.size else 0.0

    def zero(self):
        return np.zeros(self.dim)

    def to_json(self, vec):
        return {"depth": self.depth, "values": [float(x) for x in vec]}


@dataclass(frozen=True, eq=False)
class FunctionalNet:
    """Finite subset of the dual unit ball with its probe coordinates."""

    functionals: np.ndarray
    iota: np.ndarray
    covering_radius: float
    defect_bound: float
    exact: bool
    kind: str
    exact_functionals: tuple = ()

    def __len__(self):
        return self.functionals.shape[0]


def _probe_rank_ok(fiber: FiberNorm, probes) -> bool:
    ker = fiber.kernel_basis()
    return linalg.rank(list(ker) + [tuple(p) for p in probes], fiber.dim) == fiber.dim


def _iota(functionals, fiber, probes):
    pn = [max(float(fiber.norm(p)), 1.0) for p in probes]
    pr = np.asarray([[float(x) for x in p] for p in probes], dtype=float).reshape(len(probes), fiber.dim)
    return (functionals @ pr.T) / np.asarray(pn) if len(probes) else np.zeros((functionals.shape[0], 0))


def _cube_grid(r, n):
    """Points on the surface of [-1, 1]^r with n points per edge."""
    ticks = np.linspace(-1.0, 1.0, n)
    inner = ticks[1:-1]
    faces = []
    for i in range(r):
        axes = [inner] * i + [np.array([-1.0, 1.0])] + [ticks] * (r - 1 - i)
        faces.append(np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, r))
    return np.concatenate(faces)


def _cube_count(r, n):
    return n ** r - max(n - 2, 0) ** r


def _lq_constants(r, q):
    """a, b with a |x|_2 <= |x|_q <= b |x|_2 on R^r."""
    if q == INF:
        return r ** -0.5, 1.0
    e = 1.0 / float(q) - 0.5
    return (r ** e, 1.0) if float(q) >= 2 else (1.0, r ** e)


def _dedupe(rows, iota):
    if len(rows) <= 1:
        return rows, iota, list(range(len(rows)))
    keep = linalg.unique_rows_index(np.round(iota, 12)).tolist()
    return rows[keep], iota[keep], keep


def build_functional_net(fiber: FiberNorm, probes, resolution=DEFAULT_RESOLUTION, capacity=None,
                         extra=()) -> FunctionalNet:
    """Net of dual-ball functionals for ``fiber``.

    Polytope duals give the exact vertex set (defect 0).  Otherwise the dual
    sphere is sampled (angles for rank 2, a cube-surface grid above) and the
    reported ``defect_bound`` certifies (1 - eps) |v| <= max_j |w_j(v)|.
    ``extra`` functionals (norming functionals of the probes) are appended.
    """
    probes = [tuple(p) for p in probes]
    if not probes or any(len(p) != fiber.dim for p in probes):
        raise EmbeddingError("degenerate probe set: wrong dimension or empty")
    if not _probe_rank_ok(fiber, probes):
        raise EmbeddingError("degenerate probe set: probes do not span the quotient")
    k, r = fiber.dim, fiber.rank
    extra = [tuple(float(x) for x in e) for e in extra]
    budget = None if capacity is None else capacity - len(extra)
    exact_rows = ()
    if r == 0:
        rows = np.zeros((1, k))
        cov, eps, exact, kind = 0.0, 0.0, True, "zero"
    elif fiber.is_polytope:
        exact_rows = tuple(tuple(v) for v in fiber.dual_ball_vertices())
        rows = np.asarray([[float(x) for x in v] for v in exact_rows], dtype=float).reshape(-1, k)
        cov, eps, exact, kind = 0.0, 0.0, True, "vertices"
    elif r == 1:
        b = fiber.quotient_basis()[0]
        om = fiber.norming_functional(b).omega
        rows = np.asarray([[float(x) for x in om], [-float(x) for x in om]])
        cov, eps, exact, kind = 0.0, 0.0, True, "segment"
    else:
        rows, cov, eps = _sampled_net(fiber, r, resolution, budget)
        exact, kind = False, "sampled"
    if extra:
        rows = np.vstack([rows, np.asarray(extra, dtype=float).reshape(-1, k)])
    iota = _iota(rows, fiber, probes)
    rows, iota, keep = _dedupe(rows, iota)
    if exact_rows:
        exact_rows = tuple(exact_rows[i] for i in keep if i < len(exact_rows))
    if capacity is not None and len(rows) > capacity:
        raise EmbeddingError(f"net of {len(rows)} functionals does not fit in {capacity} Cantor addresses")
    return FunctionalNet(rows, iota, cov, eps, exact, kind, exact_rows)


def _sampled_net(fiber, r, resolution, budget):
    if is_ellipsoidal(fiber):
        lmat = fiber.ellipsoid_factor()  # k x r, dual ball = L (euclidean ball)
        q = 2
        to_omega = lambda z: z @ lmat.T
    elif isinstance(fiber, WeightedLp):
        sup = fiber.support
        w = np.asarray([float(fiber.weights[i]) for i in sup])
        q = conjugate_exponent(fiber.p)

        def to_omega(z):
            out = np.zeros((z.shape[0], fiber.dim))
            out[:, sup] = z * w
            return out
    else:
        raise EmbeddingError(f"no sampled net for {type(fiber).__name__}")
    if r == 2:
        m = resolution if budget is None else min(resolution, budget)
        if m < 4:
            raise EmbeddingError("resolution too small for a sampled net")
        th = 2 * np.pi * np.arange(m) / m
        z = np.stack([np.cos(th), np.sin(th)], axis=1)
        delta = 2 * math.sin(math.pi / (2 * m))
        half_angle = math.pi / m
    else:
        n = max(2, math.ceil(resolution / 4) + 1)
        while budget is not None and n > 2 and _cube_count(r, n) > budget:
            n -= 1
        if budget is not None and _cube_count(r, n) > budget:
            raise EmbeddingError("Cantor depth too small for a sampled net of this rank")
        z = _cube_grid(r, n)
        delta = (2.0 / (n - 1)) * math.sqrt(r - 1) / 2
        half_angle = math.asin(min(delta, 1.0))
    if q == 2:
        z = z / np.linalg.norm(z, axis=1, keepdims=True)
        cov = 2 * math.sin(half_angle / 2)
        eps = 1 - math.cos(half_angle) if half_angle < math.pi / 2 else 1.0
    else:
        qf = float(q)
        z = z / (np.abs(z) ** qf).sum(axis=1, keepdims=True) ** (1 / qf)
        a, b = _lq_constants(r, q)
        cov = 2 * b * delta / a
        eps = min(cov, 1.0)
    return to_omega(z), cov, eps


@dataclass(frozen=True, eq=False)
class FiberEmbedding:
    """Linear map R^k -> C(Delta_d) with certified isometry defect ``epsilon``."""

    fiber: FiberNorm
    ambient: AmbientSpace
    net: FunctionalNet
    planted: np.ndarray  # sorted addresses
    planted_functional: np.ndarray  # functional index per planted address
    table: np.ndarray  # address -> functional index

    @property
    def epsilon(self) -> float:
        return self.net.defect_bound

    def functional_at(self, a):
        """Net functional used at Cantor point ``a`` (through the retraction)."""
        return self.net.functionals[self.table[code_of(a)]]

    def functional_values(self, v):
        v = tuple(v)
        if len(v) != self.fiber.dim:
            raise DimensionMismatch(f"expected a {self.fiber.dim}-vector")
        if self.net.exact_functionals and len(self.net.exact_functionals) == len(self.net):
            return np.asarray([float(dot(w, v)) for w in self.net.exact_functionals])
        if self.net.exact:
            return np.asarray([math.fsum(float(a) * float(b) for a, b in zip(w, v)) for w in self.net.functionals])
        return self.net.functionals @ np.asarray([float(x) for x in v])

    def __call__(self, v):
        return self.functional_values(v)[self.table]

    def sup_norm(self, v) -> float:
        vals = self.functional_values(v)
        used = np.unique(self.table)
        return float(np.abs(vals[used]).max()) if used.size else 0.0

    def measured_defect(self, v) -> float:
        nv = float(self.fiber.norm(v))
        if nv == 0:
            return 0.0
        return 1.0 - self.sup_norm(v) / nv


def _sampled_requirement(fiber, r, tol):
    """Smallest resolution whose certificate is <= tol, and the resulting net size."""
    if is_ellipsoidal(fiber):
        theta = math.acos(1 - tol) if tol < 1 else math.pi / 2
        need_delta = math.sin(theta)
        if r == 2:
            m = max(4, math.ceil(math.pi / theta))
            return m, m
    elif isinstance(fiber, WeightedLp):
        a, b = _lq_constants(r, conjugate_exponent(fiber.p))
        need_delta = min(tol, 1.0) * a / (2 * b)
        if r == 2:
            m = max(4, math.ceil(math.pi / (2 * math.asin(min(need_delta / 2, 1.0)))))
            return m, m
    else:
        raise EmbeddingError(f"no sampled net for {type(fiber).__name__}")
    n = max(2, math.ceil(math.sqrt(r - 1) / need_delta) + 1)
    return 4 * (n - 1), _cube_count(r, n)


def parameters_for_tolerance(fibers, tol, extra=0, min_depth=1, max_depth=24):
    """(depth, resolution) for which every fiber's certificate is <= tol.

    ``extra`` counts the additional functionals appended per atom.  Raises
    :class:`EmbeddingError` when the net would need more than ``max_depth``.
    """
    resolution, size = 4, 1
    for f in fibers:
        r = f.rank
        if r == 0:
            n = 1
        elif f.is_polytope:
            n = len(f.dual_ball_vertices())
        elif r == 1:
            n = 2
        else:
            res, n = _sampled_requirement(f, r, tol)
            resolution = max(resolution, res)
        size = max(size, n + extra)
    # a shared resolution only grows the rank >= 3 grids it was not sized for
    for f in fibers:
        if f.rank >= 3 and not f.is_polytope:
            size = max(size, _cube_count(f.rank, max(2, math.ceil(resolution / 4) + 1)) + extra)
        elif f.rank == 2 and not f.is_polytope:
            size = max(size, resolution + extra)
    depth = max(min_depth, math.ceil(math.log2(size)) if size > 1 else 1)
    if depth > max_depth:
        raise EmbeddingError(f"tolerance {tol:.3g} needs Cantor depth {depth} > {max_depth}")
    return depth, resolution


def _plant(iota, depth):
    """Distinct addresses near the psi preimages, order preserved on collisions."""
    size = 1 << depth
    n = len(iota)
    if n > size:
        raise EmbeddingError(f"{n} functionals do not fit in {size} Cantor addresses")
    want = psi_preimage_codes(iota, depth) if iota.shape[1] else np.zeros(n, dtype=np.int64)
    order = np.argsort(want, kind="stable")
    j = np.arange(n, dtype=np.int64)
    shift = np.minimum(np.maximum.accumulate(want[order] - j), size - n)
    codes = j + shift
    return codes, order.astype(np.int64)


def embed_fiber(fiber: FiberNorm, probes, depth=DEFAULT_DEPTH, resolution=DEFAULT_RESOLUTION,
                tol=None, extra=()) -> FiberEmbedding:
    """Embed (R^k, fiber) into C(Delta_depth) with a certified defect.

    Raises :class:`EmbeddingError` when ``tol`` is given and the certificate
    exceeds it.
    """
    capacity = 1 << depth
    net = build_functional_net(fiber, probes, resolution, capacity=capacity, extra=extra)
    codes, funcs = _plant(net.iota, depth)
    idx = kernels.nearest_table(codes, depth)
    emb = FiberEmbedding(fiber, AmbientSpace(depth), net, codes, funcs, funcs[idx])
    if tol is not None and emb.epsilon > tol:
        raise EmbeddingError(f"certificate {emb.epsilon:.3g} exceeds requested tolerance {tol:.3g}; "
                             "raise depth or resolution")
    return emb


@dataclass(frozen=True, eq=False)
class CollectionEntry:
    fiber: FiberNorm
    probes: tuple
    norming: tuple


@dataclass(frozen=True, eq=False)
class EmbeddedCollection:
    ambient: AmbientSpace
    handles: Mapping

    @property
    def epsilon(self) -> float:
        return max((h.epsilon for h in self.handles.values()), default=0.0)

    def section(self, n):
        """x -> I_x[v_n(x)] for probe index n."""
        return {x: h(self.entries_probes[x][n]) for x, h in self.handles.items()}


def check_measurable_collection(collection: Mapping, tol=1e-9):
    counts = {len(e.probes) for e in collection.values()} | {len(e.norming) for e in collection.values()}
    if len(counts) > 1:
        raise EmbeddingError("inconsistent probe counts across atoms")
    for x, e in collection.items():
        if not _probe_rank_ok(e.fiber, e.probes):
            raise EmbeddingError(f"probes at {x!r} do not span the fiber")
        for v, om in zip(e.probes, e.norming):
            nv = float(e.fiber.norm(v))
            if nv == 0:
                continue
            dn = float(e.fiber.dual_norm(om))
            if abs(dn - 1) > tol or abs(float(dot(om, v)) - nv) > tol * max(1.0, nv):
                raise EmbeddingError(f"norming functional at {x!r} fails |w| = 1 or w(v) = |v|")
            # pairing entries must be finite
            for u in e.probes:
                if not math.isfinite(float(dot(om, u))):
                    raise EmbeddingError("non-finite pairing entry")


def embed_collection(collection: Mapping, depth=DEFAULT_DEPTH, resolution=DEFAULT_RESOLUTION,
                     tol=None) -> EmbeddedCollection:
    """Per-atom embeddings into one shared ambient space."""
    check_measurable_collection(collection)
    handles = {}
    for x, e in collection.items():
        extra = [om for v, om in zip(e.probes, e.norming) if e.fiber.norm(v) != 0]
        handles[x] = embed_fiber(e.fiber, e.probes, depth, resolution, tol, extra=extra)
    out = EmbeddedCollection(AmbientSpace(depth), handles)
    object.__setattr__(out, "entries_probes", {x: e.probes for x, e in collection.items()})
    return out
