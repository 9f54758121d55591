"""Univariate polynomials and rational functions, plus chart expansions."""
from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .scalars import I, exact, is_exact
from .series import LaurentJet


class _Infinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def parse_point(value):
    """A point of the projective line: a scalar literal or ``"inf"``."""
    from .scalars import parse_scalar

    if value is INF:
        return INF
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "oo", "∞"):
        return INF
    try:
        return parse_scalar(value)
    except ValueError as exc:
        raise ValueError(f"malformed point {value!r}") from exc


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Poly:
    """Coefficients from the constant term upwards."""

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(Fraction(x) if isinstance(x, int) else x for x in self.coeffs))

    @staticmethod
    def const(c):
        return Poly((c,))

    @staticmethod
    def x():
        return Poly((Fraction(0), Fraction(1)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # zero polynomial has degree -1

    def is_zero(self):
        return not self.coeffs

    @property
    def lead(self):
        return self.coeffs[-1]

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        z = Fraction(0)
        return Poly(tuple((a[i] if i < len(a) else z) + (b[i] if i < len(b) else z) for i in range(n)))

    __radd__ = __add__

    def __neg__(self):
        return Poly(tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(tuple(other * x for x in self.coeffs))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(())
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if y != 0:
                    out[i + j] = out[i + j] + x * y
        return Poly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly.const(Fraction(1))
        for _ in range(n):
            out = out * self
        return out

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(r) - len(other.coeffs) + 1)
        d = other.coeffs
        while len(r) >= len(d) and r:
            f = r[-1] / d[-1]
            k = len(r) - len(d)
            q[k] = f
            for i, y in enumerate(d):
                r[k + i] = r[k + i] - f * y
            r.pop()
            r = list(_trim(r))
        return Poly(tuple(q)), Poly(tuple(r))

    def monic(self):
        return self * (1 / self.lead)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self):
        return Poly(tuple(k * c for k, c in enumerate(self.coeffs))[1:])

    def shift(self, p):
        """Coefficients of ``f(p + z)`` as a polynomial in ``z``."""
        out = Poly(())
        zp = Poly((p, Fraction(1)))
        for c in reversed(self.coeffs):
            out = out * zp + c
        return out

    def is_exact(self):
        return all(is_exact(c) for c in self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)})"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd; only meaningful for exact coefficients."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    if a.is_zero():
        return Poly.const(Fraction(1))
    return a.monic()


def _series_quotient(a: Poly, u: Poly, n: int):
    """First ``n`` power-series coefficients of ``a/u`` (``u(0) != 0``)."""
    ac, uc = a.coeffs, u.coeffs
    u0 = uc[0]
    q = []
    for k in range(n):
        s = ac[k] if k < len(ac) else 0
        for i in range(1, min(k, len(uc) - 1) + 1):
            if uc[i] != 0:
                s = s - uc[i] * q[k - i]
        q.append(s / u0)
    return q


class RationalFunction:
    """``num/den`` with a monic denominator, gcd-reduced when exact."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, Poly):
            num = Poly.const(num)
        if den is None:
            den = Poly.const(Fraction(1))
        elif not isinstance(den, Poly):
            den = Poly.const(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = Poly.const(Fraction(1))
        elif num.is_exact() and den.is_exact() and den.degree > 0:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = num.divmod(g)[0]
                den = den.divmod(g)[0]
        lead = den.lead
        if lead != 1:
            num = num * (1 / lead)
            den = den * (1 / lead)
        self.num = num
        self.den = den

    # constructors ---------------------------------------------------------
    @staticmethod
    def const(c):
        return RationalFunction(Poly.const(c))

    @staticmethod
    def var():
        return RationalFunction(Poly.x())

    @staticmethod
    def pole(p, j: int = 1):
        """``(w - p)^-j`` for finite ``p``, ``w^j`` for ``p = INF``."""
        if p is INF:
            return RationalFunction(Poly.x() ** j)
        return RationalFunction(Poly.const(Fraction(1)), Poly((-p, Fraction(1))) ** j)

    # arithmetic -----------------------------------------------------------
    @staticmethod
    def _lift(x):
        return x if isinstance(x, RationalFunction) else RationalFunction.const(x)

    def __add__(self, other):
        o = RationalFunction._lift(other)
        if self.den.coeffs == o.den.coeffs:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RationalFunction._lift(other))

    def __rsub__(self, other):
        return RationalFunction._lift(other) + (-self)

    def __mul__(self, other):
        o = RationalFunction._lift(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RationalFunction._lift(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RationalFunction._lift(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return RationalFunction.const(Fraction(1)) / (self ** -n)
        out = RationalFunction.const(Fraction(1))
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            try:
                other = RationalFunction.const(other)
            except TypeError:
                return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        return hash((self.num.coeffs, self.den.coeffs))

    def is_zero(self):
        return self.num.is_zero()

    def is_exact(self):
        return self.num.is_exact() and self.den.is_exact()

    def is_polynomial(self):
        return self.den.degree == 0

    def __call__(self, x):
        if x is INF:
            dn, dd = self.num.degree, self.den.degree
            if self.num.is_zero() or dn < dd:
                return Fraction(0)
            if dn == dd:
                return self.num.lead / self.den.lead
            raise ZeroDivisionError("pole at infinity")
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at {x}")
        return self.num(x) / d

    def derivative(self):
        return RationalFunction(self.num.derivative() * self.den - self.num * self.den.derivative(), self.den * self.den)

    def order_at(self, p) -> int:
        """Order of vanishing (negative for poles) in the chart at ``p``."""
        if self.num.is_zero():
            raise ValueError("order of the zero function")
        if p is INF:
            return self.den.degree - self.num.degree
        return _root_mult(self.num, p) - _root_mult(self.den, p)

    def expand_at(self, p, order: int, var="t") -> LaurentJet:
        return expand_at(self, p, order, var=var)

    def __repr__(self):
        if self.den.degree == 0:
            return f"RationalFunction({list(self.num.coeffs)})"
        return f"RationalFunction({list(self.num.coeffs)} / {list(self.den.coeffs)})"


def _root_mult(f: Poly, p) -> int:
    g = f.shift(p)
    k = 0
    while k < len(g.coeffs) and g.coeffs[k] == 0:
        k += 1
    return k


def expand_at(f: RationalFunction, p, order: int, low=None, var="t") -> LaurentJet:
    """Laurent expansion in the chart ``z = w - p`` (or ``z = 1/w`` at infinity).

    ``low`` is accepted for interface symmetry; the jet always starts at the
    true valuation, so a ``low`` above the pole order just means the window
    starts higher than requested.
    """
    if not isinstance(f, RationalFunction):
        f = RationalFunction._lift(f)
    if f.is_zero():
        return LaurentJet.zero(order, var)
    if p is INF:
        rn = Poly(tuple(reversed(f.num.coeffs)))
        rd = Poly(tuple(reversed(f.den.coeffs)))
        s = f.den.degree - f.num.degree
    else:
        if isinstance(p, str):
            raise ValueError(f"malformed point {p!r}")
        rn = f.num.shift(p)
        rd = f.den.shift(p)
        vn = _lead_zeros(rn)
        vd = _lead_zeros(rd)
        rn = Poly(rn.coeffs[vn:])
        rd = Poly(rd.coeffs[vd:])
        s = vn - vd
    n = order - s
    if n <= 0:
        return LaurentJet.zero(order, var)
    q = _series_quotient(rn, rd, n)
    return LaurentJet(s, tuple(q), order, var)


def _lead_zeros(f: Poly) -> int:
    k = 0
    while k < len(f.coeffs) and f.coeffs[k] == 0:
        k += 1
    return k


# expression parsing --------------------------------------------------------

_RENAMES = [(re.compile(r"\blambda\b"), "lam"), (re.compile("λ"), "lam"), (re.compile("μ"), "mu")]


def _prep(text: str) -> str:
    src = text.strip().replace("^", "**")
    for pat, rep in _RENAMES:
        src = pat.sub(rep, src)
    return src


def _eval_rf(node, var, names):
    if isinstance(node, ast.Expression):
        return _eval_rf(node.body, var, names)
    if isinstance(node, ast.Tuple):
        return tuple(_eval_rf(e, var, names) for e in node.elts)
    if isinstance(node, ast.Constant):
        v = node.value
        if isinstance(v, bool):
            raise ValueError("boolean literal")
        if isinstance(v, int):
            return RationalFunction.const(Fraction(v))
        if isinstance(v, float):
            return RationalFunction.const(v)
        raise ValueError(f"unsupported literal {v!r}")
    if isinstance(node, ast.Name):
        if node.id == var:
            return RationalFunction.var()
        if node.id in ("i", "I"):
            return RationalFunction.const(I)
        if node.id == "pi":
            return RationalFunction.const(math.pi)
        if node.id in names:
            return names[node.id]
        raise ValueError(f"unknown name {node.id!r} (variable is {var!r})")
    if isinstance(node, ast.UnaryOp):
        v = _eval_rf(node.operand, var, names)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
    if isinstance(node, ast.BinOp):
        a = _eval_rf(node.left, var, names)
        if isinstance(node.op, ast.Pow):
            e = _int_exponent(node.right)
            return a ** e
        b = _eval_rf(node.right, var, names)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            return a / b
    raise ValueError("unsupported expression")


def _int_exponent(node) -> int:
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_int_exponent(node.operand)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.UAdd):
        return _int_exponent(node.operand)
    raise ValueError("exponents must be integer literals")


def parse_rational(text, var="w", names=None):
    """Parse a rational expression (or a parenthesised tuple of them)."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return RationalFunction.const(Fraction(text) if isinstance(text, int) else text)
    if not isinstance(text, str):
        raise ValueError(f"expected an expression string, got {type(text).__name__}")
    try:
        tree = ast.parse(_prep(text), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"malformed expression {text!r}") from exc
    return _eval_rf(tree, "lam" if var == "lambda" else var, names or {})


def coerce_exact(f: RationalFunction) -> RationalFunction:
    return RationalFunction(Poly(tuple(exact(c) for c in f.num.coeffs)), Poly(tuple(exact(c) for c in f.den.coeffs)))
