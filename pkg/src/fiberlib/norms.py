"""Finite-dimensional seminorms: evaluation, kernels, duals, norming functionals.

Three families are supported: weighted l^p, polyhedral (max of finitely many
|linear functionals|) and quadratic (sqrt of a PSD form).  Rational inputs are
kept rational as long as no irrational root is needed.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from ._num import all_exact, dot, root
from .errors import DimensionMismatch, ZeroVector

INF = math.inf
_ENUM_LIMIT = 20000
_HULL_GUIDED_FROM = 512


def _vec(v, k):
    v = tuple(v)
    if len(v) != k:
        raise DimensionMismatch(f"expected a {k}-vector, got length {len(v)}")
    return v


def _zero(exact=True):
    return Fraction(0) if exact else 0.0


def _inv(w):
    return Fraction(1) / w if isinstance(w, (int, Fraction)) else 1 / w


def conjugate_exponent(p):
    if p == 1:
        return INF
    if p == INF:
        return 1
    return Fraction(p) / (Fraction(p) - 1) if isinstance(p, (int, Fraction)) else p / (p - 1)


def _lp(values, p):
    """Plain l^p norm of a list of nonnegative-able numbers."""
    if not values:
        return Fraction(0)
    if p == INF:
        return max(abs(x) for x in values)
    if p == 1:
        exact = all_exact(values)
        return sum((abs(x) for x in values), Fraction(0)) if exact else math.fsum(abs(x) for x in values)
    if isinstance(p, int) and all_exact(values):
        return root(sum((abs(x) ** p for x in values), Fraction(0)), p)
    pf = float(p)
    return math.fsum(abs(float(x)) ** pf for x in values) ** (1.0 / pf)


class FiberNorm:
    """Seminorm on R^dim."""

    dim: int

    # subclasses provide: norm, kernel_basis, dual_norm, norming_functional,
    # dual, compose, to_json

    @property
    def rank(self) -> int:
        return self.dim - len(self.kernel_basis())

    @property
    def is_polytope(self) -> bool:
        return False

    def exact(self) -> bool:
        return False

    def quotient_projector(self):
        """Orthogonal projector onto the complement of the kernel."""
        ker = self.kernel_basis()
        exact = self.exact() and all(all_exact(b) for b in ker)
        eye = linalg.identity(self.dim, exact=exact)
        if not ker:
            return eye
        pk = linalg.orth_projector(ker, self.dim)
        return tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(eye, pk))

    def quotient_basis(self):
        """Basis of the orthogonal complement of the kernel."""
        ker = self.kernel_basis()
        if not ker:
            return list(linalg.identity(self.dim, exact=self.exact()))
        return linalg.nullspace(ker, self.dim)

    def annihilates_kernel(self, omega, tol=1e-12) -> bool:
        return all(abs(dot(b, omega)) <= tol for b in self.kernel_basis())


@dataclass(frozen=True, eq=False)
class WeightedLp(FiberNorm):
    """v -> ( sum_i (w_i |v_i|)^p )^(1/p); p may be ``math.inf``."""

    p: object
    weights: tuple

    def __post_init__(self):
        w = tuple(self.weights)
        object.__setattr__(self, "weights", w)
        if not w:
            raise ValueError("weights must be non-empty")
        if any(x < 0 for x in w):
            raise ValueError("weights must be nonnegative")
        if not (self.p == INF or self.p >= 1):
            raise ValueError("p must lie in [1, inf]")

    def __eq__(self, other):
        return isinstance(other, WeightedLp) and self.p == other.p and self.weights == other.weights

    __hash__ = None

    @property
    def dim(self):
        return len(self.weights)

    @property
    def is_polytope(self):
        return self.p in (1, INF)

    def exact(self):
        return all_exact(self.weights)

    def norm(self, v):
        v = _vec(v, self.dim)
        return _lp([w * x for w, x in zip(self.weights, v)], self.p)

    def kernel_basis(self):
        k = self.dim
        one = Fraction(1)
        return [tuple(one if j == i else Fraction(0) for j in range(k)) for i, w in enumerate(self.weights) if w == 0]

    @property
    def support(self):
        return [i for i, w in enumerate(self.weights) if w > 0]

    def dual_norm(self, omega):
        omega = _vec(omega, self.dim)
        if any(w == 0 and o != 0 for w, o in zip(self.weights, omega)):
            return INF
        z = [omega[i] * _inv(self.weights[i]) for i in self.support]
        return _lp(z, conjugate_exponent(self.p))

    def norming_functional(self, v):
        v = _vec(v, self.dim)
        nv = self.norm(v)
        if nv == 0:
            raise ZeroVector("vector has zero seminorm")
        w = self.weights
        exact = all_exact(v) and self.exact()
        om = [_zero(exact)] * self.dim
        if self.p == 1:
            for i in self.support:
                if v[i] != 0:
                    om[i] = w[i] * (1 if v[i] > 0 else -1)
        elif self.p == INF:
            i = next(i for i in self.support if w[i] * abs(v[i]) == nv)
            om[i] = w[i] * (1 if v[i] > 0 else -1)
        else:
            p = float(self.p)
            nvf = float(nv)
            for i in self.support:
                if v[i] != 0:
                    t = float(w[i] * abs(v[i]))
                    om[i] = float(w[i]) * math.copysign(t ** (p - 1) / nvf ** (p - 1), float(v[i]))
        return NormingFunctional(tuple(om), self.dual_norm(om))

    def dual(self):
        inv = tuple((_inv(w) if w > 0 else w * 0) for w in self.weights)
        return WeightedLp(conjugate_exponent(self.p), inv)

    def unit_ball_vertices(self):
        if self.p == 1:
            out = []
            for i in self.support:
                for s in (1, -1):
                    u = [_zero(self.exact())] * self.dim
                    u[i] = s * _inv(self.weights[i])
                    out.append(tuple(u))
            return out
        if self.p == INF:
            sup = self.support
            out = []
            for signs in itertools.product((1, -1), repeat=len(sup)):
                u = [_zero(self.exact())] * self.dim
                for s, i in zip(signs, sup):
                    u[i] = s * _inv(self.weights[i])
                out.append(tuple(u))
            return out
        raise ValueError("unit ball is not a polytope")

    def dual_ball_vertices(self):
        return self.dual().unit_ball_vertices()

    def ellipsoid_factor(self):
        """k x r matrix L with norm(v) = |L^T v|_2 (p = 2 only)."""
        if self.p != 2:
            raise ValueError("not an ellipsoidal norm")
        sup = self.support
        return np.array([[float(self.weights[i]) if i == j else 0.0 for j in sup] for i in range(self.dim)]).reshape(self.dim, len(sup))

    def compose(self, w_rows):
        """Seminorm lambda -> self.norm(W lambda), W given as k rows."""
        w_rows = [tuple(r) for r in w_rows]
        n = len(w_rows[0]) if w_rows else 0
        cols = list(zip(*w_rows)) if w_rows else [()] * n
        picked = []
        for c in cols:
            nz = [i for i, x in enumerate(c) if x != 0]
            if len(nz) == 1 and c[nz[0]] == 1:
                picked.append(nz[0])
            elif not nz:
                picked.append(None)
            else:
                break
        else:
            used = [i for i in picked if i is not None]
            if len(used) == len(set(used)):
                zero = self.weights[0] * 0
                return WeightedLp(self.p, tuple(self.weights[i] if i is not None else zero for i in picked))
        if self.p == 2:
            d2 = [w * w for w in self.weights]
            q = tuple(
                tuple(sum((d2[i] * w_rows[i][a] * w_rows[i][b] for i in range(self.dim)), Fraction(0) if self.exact() and all_exact(sum(w_rows, ())) else 0.0)
                      for b in range(n))
                for a in range(n))
            return Quadratic(q)
        if self.p == INF:
            return Polyhedral(tuple(tuple(self.weights[i] * x for x in w_rows[i]) for i in range(self.dim)))
        if self.p == 1:
            rows = set()
            for signs in itertools.product((1, -1), repeat=self.dim):
                rows.add(tuple(sum((s * self.weights[i] * w_rows[i][j] for i, s in enumerate(signs)), Fraction(0)) for j in range(n)))
            return Polyhedral(tuple(sorted(rows)))
        return Composed(self, tuple(w_rows))

    def to_json(self):
        from ._num import dump_number

        return {"kind": "lp", "p": "inf" if self.p == INF else dump_number(self.p),
                "weights": [dump_number(w) for w in self.weights]}


@dataclass(frozen=True, eq=False)
class Polyhedral(FiberNorm):
    """v -> max_i |<r_i, v>| for the given functional rows."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        if not rows:
            raise ValueError("a polyhedral seminorm needs at least one row")
        if len({len(r) for r in rows}) != 1 or not rows[0]:
            raise ValueError("rows must have a common positive length")
        object.__setattr__(self, "rows", rows)

    def __eq__(self, other):
        return isinstance(other, Polyhedral) and self.rows == other.rows

    __hash__ = None

    @property
    def dim(self):
        return len(self.rows[0])

    @property
    def is_polytope(self):
        return True

    def exact(self):
        return all(all_exact(r) for r in self.rows)

    def norm(self, v):
        v = _vec(v, self.dim)
        if len(self.rows) > 64 and not (self.exact() and all_exact(v)):
            return float(np.abs(self._float_rows() @ np.asarray(v, dtype=float)).max())
        return max(abs(dot(r, v)) for r in self.rows)

    def _float_rows(self):
        arr = self.__dict__.get("_farr")
        if arr is None:
            arr = np.asarray(self.rows, dtype=float)
            object.__setattr__(self, "_farr", arr)
        return arr

    def kernel_basis(self):
        return linalg.nullspace(self.rows, self.dim)

    def reduced_rows(self):
        """Rows deduplicated up to sign, zero rows dropped, canonical order."""
        seen = {}
        for r in self.rows:
            if all(x == 0 for x in r):
                continue
            first = next(x for x in r if x != 0)
            key = tuple(-x for x in r) if first < 0 else r
            seen.setdefault(key, None)
        return list(seen)

    def _independent_subsets(self, rows, r):
        for idx in itertools.combinations(range(len(rows)), r):
            sub = [rows[i] for i in idx]
            if linalg.rank(sub, self.dim) == r:
                yield sub

    def dual_norm(self, omega):
        omega = _vec(omega, self.dim)
        rows = self.reduced_rows()
        if not rows:
            return Fraction(0) if all(o == 0 for o in omega) else INF
        cols = [tuple(r[j] for r in rows) for j in range(self.dim)]  # R^T
        if linalg.solve(cols, omega) is None:
            return INF
        r = linalg.rank(rows, self.dim)
        if math.comb(len(rows), r) <= _ENUM_LIMIT:
            best = None
            for sub in self._independent_subsets(rows, r):
                gram = [[dot(a, b) for b in sub] for a in sub]
                rhs = [dot(a, omega) for a in sub]
                mu = linalg.solve(gram, rhs)
                if mu is None:
                    continue
                # mu solves R_S R_S^T mu = R_S omega; check R_S^T mu = omega
                recon = [dot([s[j] for s in sub], mu) for j in range(self.dim)]
                if any(abs(a - b) > 1e-9 * (1 + abs(b)) for a, b in zip(recon, omega)):
                    continue
                val = sum((abs(x) for x in mu), Fraction(0)) if all_exact(mu) else math.fsum(abs(x) for x in mu)
                if best is None or val < best:
                    best = val
            return best
        return _lp_dual_norm(rows, omega)

    def norming_functional(self, v):
        v = _vec(v, self.dim)
        nv = self.norm(v)
        if nv == 0:
            raise ZeroVector("vector has zero seminorm")
        cands = []
        for i, r in enumerate(self.rows):
            val = dot(r, v)
            if abs(val) == nv:
                om = r if val > 0 else tuple(-x for x in r)
                cands.append((sum(1 for x in om if x != 0), i, om))
        _, _, om = min(cands)
        # |<r, u>| <= |u| for every row and equality at v, so the dual norm is exactly 1
        return NormingFunctional(tuple(om), Fraction(1) if all_exact(om) else 1.0)

    def unit_ball_vertices(self):
        """Vertices of {u in rowspace : |R u| <= 1}."""
        rows = self.reduced_rows()
        if not rows:
            return []
        basis = linalg.row_basis(rows, self.dim)
        r = len(basis)
        exact = self.exact()
        if exact and r > 1 and math.comb(len(rows), r) * 2 ** r > _HULL_GUIDED_FROM:
            verts = _exact_hull_vertices(rows, basis, self.dim)
            if verts is not None:
                return verts
        if exact and math.comb(len(rows), r) * 2 ** r <= _ENUM_LIMIT:
            verts = []
            for sub in self._independent_subsets(rows, r):
                gram = [[dot(a, b) for b in sub] for a in sub]
                for signs in itertools.product((1, -1), repeat=r):
                    c = linalg.solve(gram, [Fraction(s) for s in signs])
                    u = tuple(sum((c[i] * sub[i][j] for i in range(r)), Fraction(0)) for j in range(self.dim))
                    if all(abs(dot(row, u)) <= 1 for row in rows) and u not in verts:
                        verts.append(u)
            return sorted(verts)
        return _hull_vertices(rows, self.dim)

    def dual_ball_vertices(self):
        return [tuple(r) for r in self.reduced_rows()] + [tuple(-x for x in r) for r in self.reduced_rows()]

    def dual(self):
        verts = self.unit_ball_vertices()
        if not verts:
            return Polyhedral((tuple(_zero(self.exact()) for _ in range(self.dim)),))
        return Polyhedral(tuple(verts))

    def compose(self, w_rows):
        w_rows = [tuple(r) for r in w_rows]
        return Polyhedral(tuple(linalg.matmul([r], w_rows)[0] for r in self.rows))

    def to_json(self):
        from ._num import dump_number

        return {"kind": "polyhedral", "rows": [[dump_number(x) for x in r] for r in self.rows]}


class ArrayPolyhedral(Polyhedral):
    """Polyhedral seminorm over float rows held as an array; tuple rows are built on demand."""

    def __init__(self, arr):
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 2 or not arr.shape[0] or not arr.shape[1]:
            raise ValueError("rows must form a non-empty 2-d array")
        object.__setattr__(self, "_farr", arr)

    @property
    def rows(self):
        rows = self.__dict__.get("_rows")
        if rows is None:
            rows = tuple(map(tuple, self._farr.tolist()))
            object.__setattr__(self, "_rows", rows)
        return rows

    @property
    def dim(self):
        return self._farr.shape[1]

    def exact(self):
        return False

    def norm(self, v):
        v = _vec(v, self.dim)
        return float(np.abs(self._farr @ np.asarray(v, dtype=float)).max())

    def __repr__(self):
        return f"ArrayPolyhedral({len(self._farr)} rows, dim={self.dim})"


def _lp_dual_norm(rows, omega):
    from scipy.optimize import linprog

    a = np.asarray(rows, dtype=float)  # m x k
    m = a.shape[0]
    # min sum(mu+ + mu-) s.t. A^T (mu+ - mu-) = omega
    c = np.ones(2 * m)
    a_eq = np.hstack([a.T, -a.T])
    res = linprog(c, A_eq=a_eq, b_eq=np.asarray(omega, dtype=float), bounds=(0, None), method="highs")
    if res.status != 0:
        return INF
    return float(res.fun)


def _exact_hull_vertices(rows, basis, dim):
    """Exact vertices of {u in rowspace : |R u| <= 1}, located by qhull and solved in rationals.

    Each facet of conv(+-rows) gives one vertex u with <s r, u> = 1 on the facet's
    rows.  Returns None when the float hull fails or a recovered point is not
    exactly feasible, so callers can fall back to enumeration.
    """
    from scipy.spatial import ConvexHull, QhullError

    r = len(basis)
    m = len(rows)
    fb = np.asarray([[float(x) for x in b] for b in basis])
    a = np.asarray([[float(x) for x in row] for row in rows]) @ np.linalg.pinv(fb)
    try:
        hull = ConvexHull(np.vstack([a, -a]))
    except (QhullError, ValueError):
        return None
    verts = set()
    for simplex in hull.simplices:
        sub = [rows[i] if i < m else tuple(-x for x in rows[i - m]) for i in simplex]
        # u = B^T c with <s_i, u> = 1 for the facet rows
        mat = [[dot(srow, b) for b in basis] for srow in sub]
        c = linalg.solve(mat, [Fraction(1)] * r)
        if c is None:
            return None
        u = tuple(sum((c[i] * basis[i][j] for i in range(r)), Fraction(0)) for j in range(dim))
        verts.add(u)
    out = sorted(verts)
    if any(abs(dot(row, u)) > 1 for row in rows for u in out):
        return None
    return out


def _hull_vertices(rows, dim):
    """Float vertex enumeration of {u in rowspace : |R u| <= 1} via qhull on the polar."""
    basis = np.asarray(linalg.row_basis([tuple(float(x) for x in r) for r in rows], dim), dtype=float)
    r = basis.shape[0]
    a = np.asarray(rows, dtype=float) @ basis.T  # m x r, coordinates of rows in the basis
    if r == 1:
        t = 1.0 / np.abs(a[:, 0]).max()
        return [tuple(t * basis[0]), tuple(-t * basis[0])]
    from scipy.spatial import ConvexHull

    pts = np.vstack([a, -a])
    hull = ConvexHull(pts)
    verts = []
    for eq in hull.equations:
        normal, off = eq[:-1], eq[-1]
        z = normal / (-off)
        verts.append(z)
    verts = np.unique(np.round(np.asarray(verts), 12), axis=0)
    return [tuple(float(x) for x in v @ basis) for v in verts]


@dataclass(frozen=True, eq=False)
class Quadratic(FiberNorm):
    """v -> sqrt(v^T Q v) for a PSD symmetric Q."""

    q: tuple

    def __post_init__(self):
        q = tuple(tuple(r) for r in self.q)
        k = len(q)
        if k == 0 or any(len(r) != k for r in q):
            raise ValueError("Q must be a non-empty square matrix")
        if any(q[i][j] != q[j][i] for i in range(k) for j in range(i)):
            if all(abs(q[i][j] - q[j][i]) <= 1e-12 for i in range(k) for j in range(i)):
                q = tuple(tuple((q[i][j] + q[j][i]) / 2 for j in range(k)) for i in range(k))
            else:
                raise ValueError("Q must be symmetric")
        ev, vecs = np.linalg.eigh(np.asarray(q, dtype=float))
        scale = max(1.0, float(np.abs(ev).max()))
        if ev.min() < -1e-10 * scale:
            raise ValueError("Q must be positive semidefinite")
        if not all(all_exact(r) for r in q) and ev.min() < 0:
            ev = np.clip(ev, 0, None)
            q = tuple(tuple(float(x) for x in row) for row in (vecs * ev) @ vecs.T)
        object.__setattr__(self, "q", q)

    def __eq__(self, other):
        return isinstance(other, Quadratic) and self.q == other.q

    __hash__ = None

    @property
    def dim(self):
        return len(self.q)

    def exact(self):
        return all(all_exact(r) for r in self.q)

    def _form(self, v):
        return dot(v, linalg.matvec(self.q, v))

    def norm(self, v):
        v = _vec(v, self.dim)
        s = self._form(v)
        if s <= 0:
            return Fraction(0) if all_exact(v) and self.exact() else 0.0
        return math.sqrt(s)

    def kernel_basis(self):
        return linalg.nullspace(self.q, self.dim)

    def dual_norm(self, omega):
        omega = _vec(omega, self.dim)
        x = linalg.solve(self.q, omega)
        if x is None:
            return INF
        s = dot(omega, x)
        return math.sqrt(s) if s > 0 else (Fraction(0) if all_exact(omega) and self.exact() else 0.0)

    def norming_functional(self, v):
        v = _vec(v, self.dim)
        nv = self.norm(v)
        if nv == 0:
            raise ZeroVector("vector has zero seminorm")
        qv = linalg.matvec(self.q, v)
        om = tuple(float(x) / nv for x in qv)
        return NormingFunctional(om, self.dual_norm(om))

    def pseudo_inverse(self):
        k = self.dim
        ker = self.kernel_basis()
        if self.exact():
            p0 = linalg.orth_projector(ker, k) if ker else tuple(tuple(Fraction(0) for _ in range(k)) for _ in range(k))
            a = [[self.q[i][j] + p0[i][j] for j in range(k)] for i in range(k)]
            cols = [linalg.solve(a, [Fraction(int(i == j)) for i in range(k)]) for j in range(k)]
            inv = [[cols[j][i] for j in range(k)] for i in range(k)]
            return tuple(tuple(inv[i][j] - p0[i][j] for j in range(k)) for i in range(k))
        pinv = np.linalg.pinv(np.asarray(self.q, dtype=float), rcond=linalg.RANK_RTOL, hermitian=True)
        pinv = (pinv + pinv.T) / 2
        return tuple(tuple(float(x) for x in r) for r in pinv)

    def dual(self):
        return Quadratic(self.pseudo_inverse())

    def ellipsoid_factor(self):
        ev, vecs = np.linalg.eigh(np.asarray(self.q, dtype=float))
        keep = ev > linalg.RANK_RTOL * max(float(ev.max()), 0.0) if ev.max() > 0 else np.zeros_like(ev, dtype=bool)
        return vecs[:, keep] * np.sqrt(ev[keep])

    def compose(self, w_rows):
        w_rows = [tuple(r) for r in w_rows]
        wt = linalg.transpose(w_rows)
        return Quadratic(linalg.matmul(linalg.matmul(wt, self.q), w_rows))

    def to_json(self):
        from ._num import dump_number

        return {"kind": "quadratic", "q": [[dump_number(x) for x in r] for r in self.q]}


@dataclass(frozen=True, eq=False)
class Composed(FiberNorm):
    """lambda -> base(W lambda) for a family without a closed form under W."""

    base: FiberNorm
    w_rows: tuple

    @property
    def dim(self):
        return len(self.w_rows[0]) if self.w_rows else 0

    def exact(self):
        return self.base.exact() and all(all_exact(r) for r in self.w_rows)

    def _apply(self, v):
        return linalg.matvec(self.w_rows, v)

    def norm(self, v):
        return self.base.norm(self._apply(_vec(v, self.dim)))

    def kernel_basis(self):
        proj = self.base.quotient_projector()
        return linalg.nullspace(linalg.matmul(proj, self.w_rows), self.dim)

    def dual_norm(self, omega):
        raise NotImplementedError("dual norm of a composed seminorm")

    def norming_functional(self, v):
        raise NotImplementedError("norming functional of a composed seminorm")

    def compose(self, w_rows):
        return Composed(self.base, tuple(linalg.matmul(self.w_rows, w_rows)))

    def to_json(self):
        from ._num import dump_number

        return {"kind": "composed", "base": self.base.to_json(),
                "w": [[dump_number(x) for x in r] for r in self.w_rows]}


@dataclass(frozen=True)
class NormingFunctional:
    omega: tuple
    dual_norm: object


@dataclass(frozen=True)
class ContractionReport:
    ok: bool
    defect: float
    method: str


def norm_eval(n: FiberNorm, v):
    return n.norm(v)


def kernel_basis(n: FiberNorm):
    """Kernel basis and rank."""
    ker = n.kernel_basis()
    return ker, n.dim - len(ker)


def dual_norm(n: FiberNorm, omega):
    """sup{<omega, v> : n(v) <= 1}; ``math.inf`` if omega sees the kernel."""
    return n.dual_norm(omega)


def norming_functional(n: FiberNorm, v) -> NormingFunctional:
    return n.norming_functional(v)


def is_ellipsoidal(n: FiberNorm) -> bool:
    return isinstance(n, Quadratic) or (isinstance(n, WeightedLp) and n.p == 2)


def sphere_samples(n: FiberNorm, count: int, seed: int = 0):
    """``count`` deterministic points on the unit sphere of ``n`` in its quotient."""
    basis = np.asarray(n.quotient_basis(), dtype=float).reshape(-1, n.dim)
    if basis.shape[0] == 0:
        return []
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((count, basis.shape[0]))
    out = []
    for row in z @ basis:
        v = tuple(float(x) for x in row)
        nv = float(n.norm(v))
        if nv > 0:
            out.append(tuple(x / nv for x in v))
    return out


def contraction_check(t_rows, src: FiberNorm, dst: FiberNorm, tol=1e-9, samples=10_000, seed=0):
    """Certify that v -> T v is 1-Lipschitz from ``src`` to ``dst``.

    ``defect`` is sup over the src unit sphere of dst(Tv) - 1.  Polytope
    sources use unit-ball vertices (exact); ellipsoidal pairs use the
    spectral bound; otherwise sphere samples are used.
    """
    t_rows = [tuple(r) for r in t_rows]
    if len(t_rows) != dst.dim or any(len(r) != src.dim for r in t_rows):
        raise DimensionMismatch(f"T must be {dst.dim}x{src.dim}")
    for b in src.kernel_basis():
        tb = linalg.matvec(t_rows, b)
        scale = max(1.0, max(abs(float(x)) for x in b))
        if float(dst.norm(tb)) > tol * scale:
            return ContractionReport(False, INF, "kernel")
    if src.rank == 0:
        return ContractionReport(True, 0.0, "zero")
    if src.is_polytope:
        tests = src.unit_ball_vertices()
        method = "vertices"
    elif is_ellipsoidal(src) and is_ellipsoidal(dst):
        ls = src.ellipsoid_factor()
        # quotient coordinates with v^T Q_s v = |z|^2: v = pinv(L_s^T) z
        b = np.linalg.pinv(ls.T)
        ld = dst.ellipsoid_factor()
        m = ld.T @ np.asarray(t_rows, dtype=float) @ b
        op = float(np.linalg.norm(m, 2)) if m.size else 0.0
        defect = op - 1.0
        return ContractionReport(defect <= tol, defect, "spectral")
    else:
        tests = sphere_samples(src, samples, seed)
        method = "sampled"
    defect = max(float(dst.norm(linalg.matvec(t_rows, u))) - float(src.norm(u)) for u in tests)
    return ContractionReport(defect <= tol, defect, method)


def from_json(obj) -> FiberNorm:
    from ._num import parse_number

    kind = obj.get("kind")
    if kind == "lp":
        p = obj.get("p", 2)
        p = INF if p in ("inf", "Infinity") or p == INF else parse_number(p)
        if isinstance(p, Fraction) and p.denominator == 1:
            p = int(p)
        return WeightedLp(p, tuple(parse_number(w) for w in obj["weights"]))
    if kind == "polyhedral":
        return Polyhedral(tuple(tuple(parse_number(x) for x in r) for r in obj["rows"]))
    if kind == "quadratic":
        return Quadratic(tuple(tuple(parse_number(x) for x in r) for r in obj["q"]))
    if kind == "composed":
        return Composed(from_json(obj["base"]), tuple(tuple(parse_number(x) for x in r) for r in obj["w"]))
    raise ValueError(f"unknown fiber norm kind {kind!r}")
