"""Row-reduced subspaces of multi-branch jet windows.

A subspace lives in the window of exponents ``[lo, order)`` on each of
``branches`` branches.  Coordinates are branch-major:
``index(i, k) = i * (order - lo) + (k - lo)``.

When ``stable`` is set the subspace stands for a lattice: it contains
every multijet vanishing to order ``>= stable`` on all branches.  The
window then only needs to reach ``stable`` and everything above is
implied.  All lattice algebra below (sums, products, colon ideals and
residue duals) relies on that tail being present.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import in_span, nullspace, rref
from .series import LaurentJet, MultiJet, WindowError


class AmbientMismatch(ValueError):
    pass


class NotContained(ValueError):
    pass


@dataclass(frozen=True)
class StalkSubspace:
    branches: int
    lo: int
    order: int
    rows: tuple
    pivots: tuple
    stable: int | None = None
    tol: float | None = None

    # basic shape ------------------------------------------------------------
    @property
    def width(self) -> int:
        return self.order - self.lo

    @property
    def ncols(self) -> int:
        return self.branches * self.width

    @property
    def dim(self) -> int:
        return len(self.rows)

    def index(self, i: int, k: int) -> int:
        return i * self.width + (k - self.lo)

    def unit(self, i: int, k: int):
        v = [Fraction(0)] * self.ncols
        v[self.index(i, k)] = Fraction(1)
        return tuple(v)

    def same_ambient(self, other) -> bool:
        return (self.branches, self.lo, self.order) == (other.branches, other.lo, other.order)

    def key(self):
        """Hashable canonical description (used for byte-identical comparisons)."""
        return (self.branches, self.lo, self.order, self.stable, tuple(tuple(str(x) for x in r) for r in self.rows))

    # membership -------------------------------------------------------------
    def contains_vec(self, v) -> bool:
        return in_span(self.rows, self.pivots, v, self.tol)

    def contains(self, jet: MultiJet) -> bool:
        """Membership of a multijet; terms at or above a stable tail are ignored."""
        if len(jet) != self.branches:
            raise AmbientMismatch("branch count differs")
        for j in jet.branches:
            if not j.is_zero and j.low < self.lo:
                return False
        need = self.order
        if jet.order < need:
            raise WindowError(f"jet known to t^{jet.order - 1}, need t^{need - 1}")
        if self.stable is None and jet.order > self.order:
            # outside the window nothing is claimed, so the window decides
            pass
        return self.contains_vec(jet.truncate(self.order).coords(self.lo, self.order))

    def contains_subspace(self, other) -> bool:
        a, b = common_window(self, other)
        return all(a.contains_vec(r) for r in b.rows)

    # jets --------------------------------------------------------------------
    def row_jets(self, order=None):
        """Basis rows as exact multijets (polynomials), truncated at ``order``."""
        order = self.order if order is None else order
        out = []
        for r in self.rows:
            mj = MultiJet.from_coords(r, self.branches, self.lo, self.order)
            if order <= self.order:
                out.append(mj.truncate(order))
            else:
                out.append(MultiJet(tuple(LaurentJet(j.low, j.coeffs, order) for j in mj.branches)))
        return out

    def basis_mod(self, K: int):
        """Multijets spanning this lattice modulo ``t^K``."""
        if self.stable is None and K > self.order:
            raise WindowError("subspace has no certified tail")
        out = [j for j in self.row_jets(K) if not all(b.is_zero for b in j.branches)]
        for i in range(self.branches):
            for k in range(self.order, K):
                out.append(MultiJet.unit(i, k, self.branches, K))
        return out

    def branch_valuations(self):
        """Smallest exponent reached on each branch (the tail counts)."""
        out = []
        for i in range(self.branches):
            best = self.order if self.stable is not None else None
            for r in self.rows:
                for k in range(self.lo, self.order):
                    if r[self.index(i, k)] != 0:
                        if best is None or k < best:
                            best = k
                        break
            out.append(best)
        return out

    def annihilator(self):
        """Rows ``q`` with ``q . v = 0`` for every ``v`` in the subspace."""
        return nullspace(self.rows, self.ncols, self.tol)

    # re-windowing -----------------------------------------------------------
    def embed(self, lo: int, order: int):
        if lo > self.lo:
            raise AmbientMismatch("cannot raise the lower window bound")
        if order < self.order:
            raise AmbientMismatch("cannot shrink the window with embed")
        if order > self.order and self.stable is None:
            raise WindowError("cannot extend an uncertified subspace")
        w_new = order - lo
        zero = Fraction(0)
        vecs = []
        for r in self.rows:
            v = [zero] * (self.branches * w_new)
            for i in range(self.branches):
                for k in range(self.lo, self.order):
                    v[i * w_new + (k - lo)] = r[self.index(i, k)]
            vecs.append(v)
        for i in range(self.branches):
            for k in range(self.order, order):
                v = [zero] * (self.branches * w_new)
                v[i * w_new + (k - lo)] = Fraction(1)
                vecs.append(v)
        return rref_span(vecs, self.branches, lo, order, stable=self.stable, tol=self.tol)

    def find_stable(self):
        """Least ``m`` with every ``t^k e_i`` (``m <= k < order``) inside, or None."""
        m = self.order
        for k in range(self.order - 1, self.lo - 1, -1):
            if all(self.contains_vec(self.unit(i, k)) for i in range(self.branches)):
                m = k
            else:
                break
        return m

    def canonical(self):
        """Shrink to the minimal window; requires a certified tail."""
        if self.stable is None:
            raise WindowError("canonical form needs a certified tail")
        h = self.find_stable()
        w = self.width
        vecs = []
        for r in self.rows:
            v = []
            for i in range(self.branches):
                v.extend(r[i * w:i * w + (h - self.lo)])
            vecs.append(v)
        tmp = rref_span(vecs, self.branches, self.lo, h, tol=self.tol)
        lo2 = h
        for r in tmp.rows:
            for i in range(self.branches):
                for k in range(self.lo, h):
                    if r[tmp.index(i, k)] != 0:
                        lo2 = min(lo2, k)
                        break
        wt = h - self.lo
        vecs = []
        for r in tmp.rows:
            v = []
            for i in range(self.branches):
                v.extend(r[i * wt + (lo2 - self.lo):(i + 1) * wt])
            vecs.append(v)
        return rref_span(vecs, self.branches, lo2, h, stable=h, tol=self.tol)

    def __repr__(self):
        return f"StalkSubspace(b={self.branches}, window=[{self.lo},{self.order}), dim={self.dim}, stable={self.stable})"


def rref_span(vectors, branches: int, lo: int, order: int, stable=None, tol=None) -> StalkSubspace:
    n = branches * (order - lo)
    rows, piv = rref(list(vectors), n, tol)
    return StalkSubspace(branches, lo, order, tuple(rows), tuple(piv), stable, tol)


def span_jets(jets, branches: int, lo: int, order: int, stable=None, tol=None) -> StalkSubspace:
    return rref_span([j.coords(lo, order) for j in jets], branches, lo, order, stable, tol)


def full(branches: int, lo: int = 0) -> StalkSubspace:
    """``t^lo`` times the whole ambient: empty window, tail from ``lo``."""
    return StalkSubspace(branches, lo, lo, (), (), lo)


def common_window(a: StalkSubspace, b: StalkSubspace):
    if a.branches != b.branches:
        raise AmbientMismatch("branch counts differ")
    if a.same_ambient(b):
        return a, b
    lo = min(a.lo, b.lo)
    order = max(a.order, b.order)
    return a.embed(lo, order), b.embed(lo, order)


def quotient_dim(V: StalkSubspace, W: StalkSubspace) -> int:
    """``dim V/W`` for ``W`` inside ``V``."""
    a, b = common_window(V, W)
    for r in b.rows:
        if not a.contains_vec(r):
            raise NotContained("W is not contained in V")
    return a.dim - b.dim


def relative_index(S: StalkSubspace, R: StalkSubspace) -> int:
    """``dim(T/R) - dim(T/S)`` for any common over-lattice ``T``."""
    a, b = common_window(S, R)
    return a.dim - b.dim


def lattice_sum(a: StalkSubspace, b: StalkSubspace) -> StalkSubspace:
    a, b = common_window(a, b)
    return rref_span(list(a.rows) + list(b.rows), a.branches, a.lo, a.order, stable=a.stable, tol=a.tol).canonical()


def lattice_equal(a: StalkSubspace, b: StalkSubspace) -> bool:
    a, b = common_window(a, b)
    return a.dim == b.dim and all(a.contains_vec(r) for r in b.rows)


def intersect(a: StalkSubspace, b: StalkSubspace) -> StalkSubspace:
    a, b = common_window(a, b)
    cond = list(a.annihilator()) + list(b.annihilator())
    vecs = nullspace(cond, a.ncols, a.tol) if cond else [a.unit(i, k) for i in range(a.branches) for k in range(a.lo, a.order)]
    out = rref_span(vecs, a.branches, a.lo, a.order, stable=a.stable, tol=a.tol)
    return out.canonical() if out.stable is not None else out


def lattice_mul(a: StalkSubspace, b: StalkSubspace) -> StalkSubspace:
    """Span of all products ``x*y``; both factors need certified tails."""
    if a.stable is None or b.stable is None:
        raise WindowError("lattice product needs certified tails")
    if a.branches != b.branches:
        raise AmbientMismatch("branch counts differ")
    mu_a = a.branch_valuations()
    mu_b = b.branch_valuations()
    H = min(max(x + b.order for x in mu_a), max(x + a.order for x in mu_b))
    lo = a.lo + b.lo
    if H <= lo:
        return full(a.branches, H)
    A = a.basis_mod(H - b.lo)
    B = b.basis_mod(H - a.lo)
    vecs = []
    for x in A:
        for y in B:
            vecs.append((x * y).truncate(H).coords(lo, H))
    return rref_span(vecs, a.branches, lo, H, stable=H, tol=a.tol).canonical()


def colon(a: StalkSubspace, b: StalkSubspace) -> StalkSubspace:
    """``{f in Obar : f*b inside a}`` as a lattice with lowest exponent 0."""
    if a.stable is None or b.stable is None:
        raise WindowError("colon needs certified tails")
    nb = a.branches
    K = a.order - b.lo
    if K <= 0:
        return full(nb, 0)
    lo = min(a.lo, b.lo, 0)
    A = a.embed(lo, a.order) if a.lo > lo else a
    Q = A.annihilator()
    B = b.basis_mod(a.order)
    # columns: f = sum c_{i,k} t^k e_i for 0 <= k < K
    cols = [(i, k) for i in range(nb) for k in range(K)]
    cond = []
    for y in B:
        imgs = []
        for (i, k) in cols:
            yi = y.branches[i]
            v = [Fraction(0)] * A.ncols
            if not yi.is_zero:
                sh = yi.shift(k)
                for e in range(max(sh.low, lo), a.order):
                    c = sh.coeff(e)
                    if c != 0:
                        v[A.index(i, e)] = c
            imgs.append(v)
        for q in Q:
            row = []
            for v in imgs:
                s = 0
                for qi, vi in zip(q, v):
                    if qi != 0 and vi != 0:
                        s = s + qi * vi
                row.append(s)
            if any(x != 0 for x in row):
                cond.append(row)
    n = len(cols)
    if cond:
        sol = nullspace(cond, n, a.tol)
    else:
        sol = [tuple(Fraction(1) if j == t else Fraction(0) for j in range(n)) for t in range(n)]
    return rref_span(sol, nb, 0, K, stable=K, tol=a.tol).canonical()


def residue_dual(L: StalkSubspace) -> StalkSubspace:
    """``{phi : sum_i Res(f_i phi_i) = 0 for all f in L}`` (coefficients of dt)."""
    if L.stable is None:
        raise WindowError("residue dual needs a certified tail")
    b = L.branches
    lo, order = -L.order, -L.lo
    W = order - lo
    cond = []
    for r in L.rows:
        v = [Fraction(0)] * (b * W)
        for i in range(b):
            for k in range(L.lo, L.order):
                c = r[L.index(i, k)]
                if c != 0:
                    v[i * W + (-1 - k - lo)] = c
        cond.append(v)
    n = b * W
    if n == 0:
        return full(b, order)
    if cond:
        sol = nullspace(cond, n, L.tol)
    else:
        sol = [tuple(Fraction(1) if j == t else Fraction(0) for j in range(n)) for t in range(n)]
    return rref_span(sol, b, lo, order, stable=order, tol=L.tol).canonical()


def scale_branches(L: StalkSubspace, factors) -> StalkSubspace:
    """Image of a lattice under multiplication by one exact jet per branch.

    Each factor must be a unit times a power of ``t`` so the image is again
    a lattice; factors are given as callables ``order -> LaurentJet``.
    """
    vals = []
    for f in factors:
        j = f(1)
        while j.is_zero:
            j = f(j.order + 4)
        vals.append(j.low)
    shift_hi = max(L.order + v for v in vals)
    lo = L.lo + min(vals)
    jets = []
    for x in L.basis_mod(shift_hi - min(vals)):
        parts = []
        for i, j in enumerate(x.branches):
            fj = factors[i](shift_hi - (j.low if not j.is_zero else L.lo) + 1)
            parts.append((j * fj).truncate(shift_hi) if not j.is_zero else LaurentJet.zero(shift_hi))
        jets.append(MultiJet(tuple(parts)))
    # tail: the image of t^{L.order} Obar on branch i is t^{L.order+v_i} Obar
    return span_jets(jets, L.branches, lo, shift_hi, stable=shift_hi, tol=L.tol).canonical()
