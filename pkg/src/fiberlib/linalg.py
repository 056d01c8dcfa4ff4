"""Small dense linear algebra on rows of numbers.

Matrices are sequences of row tuples.  When every entry is rational the
routines run Gaussian elimination over ``Fraction``; otherwise they defer to
an SVD with relative rank tolerance ``RANK_RTOL``.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from ._num import all_exact, dot

RANK_RTOL = 1e-10


def _exact(rows) -> bool:
    return all(all_exact(r) for r in rows)


def unique_rows_index(arr) -> np.ndarray:
    """Sorted indices of the first occurrence of each distinct row of a float array."""
    arr = np.asarray(arr, dtype=float) + 0.0
    n = len(arr)
    if n <= 1:
        return np.arange(n)
    # sort by a fixed random projection; only equal-key runs need a row comparison
    key = arr @ np.random.default_rng(0).standard_normal(arr.shape[1]) if arr.shape[1] else np.zeros(n)
    order = np.argsort(key, kind="stable")
    ks, rs = key[order], arr[order]
    same_key = ks[1:] == ks[:-1]
    same_row = same_key & np.all(rs[1:] == rs[:-1], axis=1)
    dup = np.zeros(n, dtype=bool)
    dup[order[1:][same_row]] = True
    if np.any(same_key & ~same_row):
        # distinct rows sharing a key: settle those runs by direct comparison
        bounds = np.flatnonzero(~same_key) + 1
        for lo, hi in zip(np.r_[0, bounds], np.r_[bounds, n]):
            if hi - lo < 2:
                continue
            seen = set()
            for i in sorted(order[lo:hi].tolist()):
                t = arr[i].tobytes()
                dup[i] = t in seen
                seen.add(t)
    return np.flatnonzero(~dup)


def as_fraction_rows(rows):
    return [[Fraction(x) for x in r] for r in rows]


def rref(rows, ncols):
    """Reduced row echelon form over the rationals. Returns (rows, pivots)."""
    m = as_fraction_rows(rows)
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows, ncols=None) -> int:
    rows = [tuple(r) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0]) if ncols is None else ncols
    if _exact(rows):
        return len(rref(rows, ncols)[1])
    a = np.asarray(rows, dtype=float)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > RANK_RTOL * s[0]))


def nullspace(rows, ncols):
    """Basis of {v : A v = 0} as a list of tuples."""
    rows = [tuple(r) for r in rows]
    if not rows:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    if _exact(rows):
        red, pivots = rref(rows, ncols)
        free = [c for c in range(ncols) if c not in pivots]
        basis = []
        for f in free:
            v = [Fraction(0)] * ncols
            v[f] = Fraction(1)
            for row, pc in zip(red, pivots):
                v[pc] = -row[f]
            basis.append(tuple(v))
        return basis
    a = np.asarray(rows, dtype=float)
    _, s, vt = np.linalg.svd(a)
    tol = RANK_RTOL * (s[0] if s.size else 0.0)
    r = int(np.sum(s > tol)) if s.size and s[0] > 0 else 0
    return [tuple(float(x) for x in vt[i]) for i in range(r, ncols)]


def row_basis(rows, ncols):
    """Basis of the row space."""
    rows = [tuple(r) for r in rows]
    if not rows:
        return []
    if _exact(rows):
        return [tuple(r) for r in rref(rows, ncols)[0]]
    a = np.asarray(rows, dtype=float)
    _, s, vt = np.linalg.svd(a)
    if not s.size or s[0] == 0:
        return []
    r = int(np.sum(s > RANK_RTOL * s[0]))
    return [tuple(float(x) for x in vt[i]) for i in range(r)]


def solve(a_rows, b):
    """Some solution x of A x = b, or None when the system is inconsistent.

    Exact systems are solved by elimination; float systems by least squares
    with a residual check.
    """
    a_rows = [tuple(r) for r in a_rows]
    ncols = len(a_rows[0]) if a_rows else 0
    if _exact(a_rows) and all_exact(b):
        aug = [list(r) + [bi] for r, bi in zip(a_rows, b)]
        red, pivots = rref(aug, ncols + 1)
        if ncols in pivots:
            return None
        x = [Fraction(0)] * ncols
        for row, pc in zip(red, pivots):
            x[pc] = row[ncols]
        return tuple(x)
    a = np.asarray(a_rows, dtype=float).reshape(len(a_rows), ncols)
    bb = np.asarray([float(v) for v in b])
    x, *_ = np.linalg.lstsq(a, bb, rcond=None)
    scale = max(1.0, float(np.abs(bb).max(initial=0.0)))
    if np.abs(a @ x - bb).max(initial=0.0) > 1e-9 * scale:
        return None
    return tuple(float(v) for v in x)


def orth_projector(basis, ncols):
    """Orthogonal projector onto the span of ``basis`` (as row tuples)."""
    basis = [tuple(b) for b in basis]
    if not basis:
        return tuple(tuple(Fraction(0) for _ in range(ncols)) for _ in range(ncols))
    if _exact(basis):
        b = as_fraction_rows(basis)
        g = [[sum((x * y for x, y in zip(bi, bj)), Fraction(0)) for bj in b] for bi in b]
        n = len(b)
        ginv = []
        for j in range(n):
            e = [Fraction(int(i == j)) for i in range(n)]
            ginv.append(solve(g, e))
        # P = B^T G^{-1} B ; ginv rows are columns of G^{-1} (G symmetric)
        coef = [[sum((ginv[i][l] * b[l][c] for l in range(n)), Fraction(0)) for c in range(ncols)]
                for i in range(n)]
        return tuple(
            tuple(sum((b[i][r] * coef[i][c] for i in range(n)), Fraction(0)) for c in range(ncols))
            for r in range(ncols)
        )
    q, _ = np.linalg.qr(np.asarray(basis, dtype=float).T)
    p = q @ q.T
    return tuple(tuple(float(x) for x in row) for row in p)


def identity(n, exact=True):
    one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def matvec(a_rows, v):
    return tuple(dot(r, v) for r in a_rows)


def matmul(a_rows, b_rows):
    bt = list(zip(*b_rows)) if b_rows else []
    return tuple(tuple(dot(r, c) for c in bt) for r in a_rows)


def transpose(a_rows):
    return tuple(zip(*a_rows))

