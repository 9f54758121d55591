"""Row reduction over either scalar kind.

``tol=None`` means exact arithmetic and exact zero tests.  A float
``tol`` switches to partial pivoting by magnitude, and entries below
``tol * max|entry|`` count as zero.
"""
from __future__ import annotations

from fractions import Fraction

from .scalars import is_exact, magnitude

DEFAULT_TOL = 1e-10


def _scale(rows, tol):
    if tol is None:
        return None
    big = 0.0
    for r in rows:
        for x in r:
            m = magnitude(x)
            if m > big:
                big = m
    return tol * big if big > 0 else tol


def rref(rows, ncols: int, tol=None):
    """Reduced row echelon form.

    Returns ``(basis, pivots)`` where ``basis`` is a list of tuples and
    ``pivots`` the pivot column of each row.
    """
    m = [list(r) for r in rows]
    for r in m:
        if len(r) != ncols:
            raise ValueError(f"row of length {len(r)} in an ambient of dimension {ncols}")
    eps = _scale(m, tol)
    pivots = []
    prow = 0
    for c in range(ncols):
        if prow >= len(m):
            break
        best = None
        if tol is None:
            for i in range(prow, len(m)):
                if m[i][c] != 0:
                    best = i
                    break
        else:
            bestmag = eps
            for i in range(prow, len(m)):
                v = magnitude(m[i][c])
                if v > bestmag:
                    best, bestmag = i, v
        if best is None:
            continue
        m[prow], m[best] = m[best], m[prow]
        piv = m[prow][c]
        row = [x / piv for x in m[prow]]
        row[c] = Fraction(1) if tol is None else 1.0
        m[prow] = row
        for i in range(len(m)):
            if i == prow:
                continue
            f = m[i][c]
            if (f != 0) if tol is None else (magnitude(f) > 0):
                mi = m[i]
                for k in range(c, ncols):
                    if row[k] != 0:
                        mi[k] = mi[k] - f * row[k]
                mi[c] = 0 if tol is None else 0.0
        pivots.append(c)
        prow += 1
    basis = [tuple(r) for r in m[:prow]]
    if tol is not None:
        basis = [tuple(0.0 if magnitude(x) <= eps else x for x in r) for r in basis]
    return basis, pivots


def rank(rows, ncols: int, tol=None) -> int:
    return len(rref(rows, ncols, tol)[0])


def nullspace(rows, ncols: int, tol=None):
    """Basis of ``{x : A x = 0}`` for ``A`` given by its rows."""
    basis, pivots = rref(rows, ncols, tol)
    one = Fraction(1) if tol is None else 1.0
    zero = Fraction(0) if tol is None else 0.0
    free = [c for c in range(ncols) if c not in set(pivots)]
    out = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for r, p in zip(basis, pivots):
            v[p] = -r[f]
        out.append(tuple(v))
    return out


def solve(rows, rhs, ncols: int, tol=None):
    """One solution of ``A x = b`` with free variables set to zero, or None."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    basis, pivots = rref(aug, ncols + 1, tol)
    if pivots and pivots[-1] == ncols:
        return None
    zero = Fraction(0) if tol is None else 0.0
    x = [zero] * ncols
    for r, p in zip(basis, pivots):
        x[p] = r[ncols]
    return tuple(x)


def in_span(basis, pivots, v, tol=None) -> bool:
    """Membership of ``v`` in the row space of an rref basis."""
    w = list(v)
    for r, p in zip(basis, pivots):
        f = w[p]
        if f != 0:
            w = [a - f * b for a, b in zip(w, r)]
    if tol is None:
        return all(x == 0 for x in w)
    big = max([magnitude(x) for x in v] + [1.0])
    return all(magnitude(x) <= tol * big for x in w)


def kind_tol(values, tol=None):
    """Pick ``None`` when every value is exact, else a numeric tolerance."""
    if tol is not None:
        return tol
    for x in values:
        if not is_exact(x):
            return DEFAULT_TOL
    return None
