"""Truncated Laurent jets.

A jet knows its coefficients for exponents ``low .. order-1``; beyond
``order`` nothing is known.  Arithmetic shrinks the known window
whenever pole parts get multiplied into unknown tails.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

from .scalars import is_exact, magnitude


class CoordinateMismatch(ValueError):
    pass


class WindowError(ValueError):
    """Requested coefficient lies outside the known window."""


def _zero_like(x):
    return Fraction(0) if is_exact(x) else 0.0


@dataclass(frozen=True)
class LaurentJet:
    low: int
    coeffs: tuple
    order: int
    var: str = "t"

    def __post_init__(self):
        c = [Fraction(x) if type(x) is int else x for x in self.coeffs]
        low = self.low
        if low + len(c) > self.order:
            c = c[: max(0, self.order - low)]
        while c and c[0] == 0:
            c.pop(0)
            low += 1
        if not c:
            low = self.order
        # pad so the window always reaches the truncation order
        c += [Fraction(0)] * (self.order - low - len(c))
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "coeffs", tuple(c))

    # constructors ---------------------------------------------------------
    @staticmethod
    def zero(order: int, var="t"):
        return LaurentJet(order, (), order, var)

    @staticmethod
    def monomial(k: int, order: int, c=Fraction(1), var="t"):
        if k >= order:
            return LaurentJet.zero(order, var)
        return LaurentJet(k, (c,), order, var)

    @staticmethod
    def from_dict(terms: dict, order: int, var="t"):
        """Polynomial jet from ``{exponent: coefficient}``; exact up to ``order``."""
        terms = {k: v for k, v in terms.items() if v != 0 and k < order}
        if not terms:
            return LaurentJet.zero(order, var)
        lo = min(terms)
        c = [Fraction(0)] * (order - lo)
        for k, v in terms.items():
            c[k - lo] = v
        return LaurentJet(lo, tuple(c), order, var)

    # queries ----------------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def valuation(self):
        """Lowest exponent with a nonzero coefficient, or None for the zero jet."""
        return None if self.is_zero else self.low

    def coeff(self, k: int):
        if k >= self.order:
            raise WindowError(f"coefficient t^{k} unknown (truncation order {self.order})")
        if k < self.low:
            return Fraction(0) if not self.coeffs or is_exact(self.coeffs[0]) else 0.0
        return self.coeffs[k - self.low]

    def window(self, lo: int, hi: int):
        """Coefficients for exponents ``lo .. hi-1``; all must be known."""
        if hi > self.order:
            raise WindowError(f"need t^{hi - 1} but truncation order is {self.order}")
        if not self.is_zero and self.low < lo:
            raise WindowError(f"jet has a term t^{self.low} below window start {lo}")
        return [self.coeff(k) for k in range(lo, hi)]

    def _check(self, other):
        if self.var != other.var:
            raise CoordinateMismatch(f"{self.var} vs {other.var}")

    # arithmetic -----------------------------------------------------------
    def truncate(self, order: int):
        if order > self.order:
            raise WindowError(f"cannot extend truncation from {self.order} to {order}")
        return LaurentJet(self.low, self.coeffs, order, self.var)

    def __add__(self, other):
        if not isinstance(other, LaurentJet):
            other = LaurentJet(0, (other,), self.order, self.var) if self.order > 0 else LaurentJet.zero(self.order, self.var)
        self._check(other)
        n = min(self.order, other.order)
        lo = min(self.low, other.low)
        c = [self.coeff(k) + other.coeff(k) for k in range(lo, n)]
        return LaurentJet(lo, tuple(c), n, self.var)

    __radd__ = __add__

    def __neg__(self):
        return LaurentJet(self.low, tuple(-x for x in self.coeffs), self.order, self.var)

    def __sub__(self, other):
        if not isinstance(other, LaurentJet):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        return LaurentJet(self.low, tuple(c * x for x in self.coeffs), self.order, self.var)

    def shift(self, k: int):
        """Multiply by ``t^k`` (exact, moves the window)."""
        return LaurentJet(self.low + k, self.coeffs, self.order + k, self.var)

    def __mul__(self, other):
        if not isinstance(other, LaurentJet):
            return self.scale(other)
        return series_mul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def derivative(self):
        c = [k * self.coeff(k) for k in range(self.low, self.order)]
        return LaurentJet(self.low - 1, tuple(c), self.order - 1, self.var)

    def evaluate(self, z):
        """Sum of the known window at a numeric point (test helper)."""
        return sum(complex(x) * z ** (self.low + i) for i, x in enumerate(self.coeffs))

    def is_exact(self) -> bool:
        return all(is_exact(x) for x in self.coeffs)

    def __repr__(self):
        terms = [f"({x})*{self.var}^{self.low + i}" for i, x in enumerate(self.coeffs) if x != 0]
        return f"LaurentJet({' + '.join(terms) or '0'} + O({self.var}^{self.order}))"


def series_mul(a: LaurentJet, b: LaurentJet) -> LaurentJet:
    """Product on the honestly known window."""
    a._check(b)
    va = a.order if a.is_zero else a.low
    vb = b.order if b.is_zero else b.low
    order = min(a.order + vb, b.order + va)
    if a.is_zero or b.is_zero:
        return LaurentJet.zero(order, a.var)
    lo = va + vb
    n = order - lo
    ac, bc = a.coeffs, b.coeffs
    out = []
    for k in range(n):
        s = 0
        for i in range(max(0, k - len(bc) + 1), min(k, len(ac) - 1) + 1):
            x = ac[i]
            if x != 0:
                y = bc[k - i]
                if y != 0:
                    s = s + x * y
        out.append(s)
    return LaurentJet(lo, tuple(out), order, a.var)


def series_inv(a: LaurentJet, tol=None) -> LaurentJet:
    """Inverse on the known window; the window length is preserved."""
    if a.is_zero:
        raise ZeroDivisionError("inverse of the zero jet")
    lead = a.coeffs[0]
    if tol is not None and magnitude(lead) <= tol:
        raise ZeroDivisionError("leading coefficient below tolerance")
    v = a.low
    n = a.order - v
    u = a.coeffs
    inv = [1 / lead]
    for k in range(1, n):
        s = 0
        for i in range(1, k + 1):
            if u[i] != 0:
                s = s + u[i] * inv[k - i]
        inv.append(-s / lead)
    return LaurentJet(-v, tuple(inv), -v + n, a.var)


def series_div(a: LaurentJet, b: LaurentJet, tol=None) -> LaurentJet:
    return series_mul(a, series_inv(b, tol))


def series_exp(a: LaurentJet) -> LaurentJet:
    """``exp`` of a jet with no pole part."""
    if a.is_zero:
        one = Fraction(1)
        return LaurentJet(0, (one,), a.order, a.var) if a.order > 0 else LaurentJet.zero(a.order, a.var)
    if a.low < 0:
        raise ValueError("exp of a jet with a pole")
    n = a.order
    c = [a.coeff(k) for k in range(0, n)]
    c0 = c[0]
    if c0 == 0:
        e0 = Fraction(1)
    else:
        e0 = cmath.exp(complex(c0))
    e = [e0]
    for k in range(1, n):
        s = 0 * e0
        for j in range(1, k + 1):
            if c[j] != 0:
                s = s + j * c[j] * e[k - j]
        e.append(s / k)
    return LaurentJet(0, tuple(e), n, a.var)


@dataclass(frozen=True)
class MultiJet:
    """One jet per branch, all with the same truncation order."""

    branches: tuple

    def __post_init__(self):
        br = tuple(self.branches)
        if not br:
            raise ValueError("a multijet needs at least one branch")
        n = min(j.order for j in br)
        br = tuple(j if j.order == n else j.truncate(n) for j in br)
        object.__setattr__(self, "branches", br)

    @property
    def order(self) -> int:
        return self.branches[0].order

    @property
    def count(self) -> int:
        return len(self.branches)

    def __len__(self):
        return len(self.branches)

    def __getitem__(self, i):
        return self.branches[i]

    @staticmethod
    def constant(c, b: int, order: int):
        return MultiJet(tuple(LaurentJet.monomial(0, order, c) for _ in range(b)))

    @staticmethod
    def unit(i: int, k: int, b: int, order: int):
        """``t^k`` on branch ``i``, zero elsewhere."""
        return MultiJet(tuple(LaurentJet.monomial(k, order) if j == i else LaurentJet.zero(order) for j in range(b)))

    def _pair(self, other):
        if len(other.branches) != len(self.branches):
            raise CoordinateMismatch("branch counts differ")

    def __add__(self, other):
        self._pair(other)
        return MultiJet(tuple(a + b for a, b in zip(self.branches, other.branches)))

    def __sub__(self, other):
        self._pair(other)
        return MultiJet(tuple(a - b for a, b in zip(self.branches, other.branches)))

    def __neg__(self):
        return MultiJet(tuple(-a for a in self.branches))

    def __mul__(self, other):
        if isinstance(other, MultiJet):
            self._pair(other)
            return MultiJet(tuple(series_mul(a, b) for a, b in zip(self.branches, other.branches)))
        return MultiJet(tuple(a.scale(other) for a in self.branches))

    def __rmul__(self, other):
        return MultiJet(tuple(a.scale(other) for a in self.branches))

    def truncate(self, order: int):
        return MultiJet(tuple(j.truncate(order) for j in self.branches))

    @property
    def valuations(self):
        return [j.valuation for j in self.branches]

    def values(self):
        """Exponent-0 coefficient on every branch."""
        return [j.coeff(0) for j in self.branches]

    def coords(self, lo: int, hi: int):
        """Flattened coordinate vector for the window ``[lo, hi)``, branch-major."""
        out = []
        for j in self.branches:
            out.extend(j.window(lo, hi))
        return tuple(out)

    @staticmethod
    def from_coords(vec, b: int, lo: int, hi: int):
        w = hi - lo
        return MultiJet(tuple(LaurentJet(lo, tuple(vec[i * w:(i + 1) * w]), hi) for i in range(b)))


@dataclass(frozen=True)
class FormJet:
    """Coefficient jet(s) of ``dt``: ``jet * dt``."""

    jet: object  # LaurentJet or MultiJet

    def branches(self):
        if isinstance(self.jet, MultiJet):
            return self.jet.branches
        return (self.jet,)


def residue(omega) -> object:
    """Coefficient of ``t^-1 dt``, summed over branches."""
    if isinstance(omega, FormJet):
        parts = omega.branches()
    elif isinstance(omega, MultiJet):
        parts = omega.branches
    else:
        parts = (omega,)
    total = 0
    for j in parts:
        if j.order <= -1:
            raise WindowError("window does not include exponent -1")
        total = total + j.coeff(-1)
    return total
