"""Scalar kinds.

Exact scalars are Gaussian rationals.  Purely real values stay plain
``Fraction`` objects so the common case pays no overhead; ``QI`` only
appears once an imaginary part shows up.  Numeric scalars are Python
``complex`` (or ``float``) and are only ever compared via an explicit
tolerance.
"""
from __future__ import annotations

import ast
import math
import numbers
from fractions import Fraction


class QI:
    """Gaussian rational ``re + im*i`` with ``Fraction`` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    # construction helpers -------------------------------------------------
    @staticmethod
    def make(re, im):
        """Return a Fraction when the imaginary part vanishes."""
        im = Fraction(im)
        if im == 0:
            return Fraction(re)
        return QI(re, im)

    @staticmethod
    def _parts(x):
        if isinstance(x, QI):
            return x.re, x.im
        if isinstance(x, (int, Fraction)):
            return Fraction(x), Fraction(0)
        return None

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        p = QI._parts(other)
        if p is None:
            return complex(self) + other if isinstance(other, numbers.Number) else NotImplemented
        return QI.make(self.re + p[0], self.im + p[1])

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, other):
        p = QI._parts(other)
        if p is None:
            return complex(self) - other if isinstance(other, numbers.Number) else NotImplemented
        return QI.make(self.re - p[0], self.im - p[1])

    def __rsub__(self, other):
        p = QI._parts(other)
        if p is None:
            return other - complex(self) if isinstance(other, numbers.Number) else NotImplemented
        return QI.make(p[0] - self.re, p[1] - self.im)

    def __mul__(self, other):
        p = QI._parts(other)
        if p is None:
            return complex(self) * other if isinstance(other, numbers.Number) else NotImplemented
        a, b = self.re, self.im
        c, d = p
        return QI.make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        p = QI._parts(other)
        if p is None:
            return complex(self) / other if isinstance(other, numbers.Number) else NotImplemented
        c, d = p
        den = c * c + d * d
        if den == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        a, b = self.re, self.im
        return QI.make((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other):
        p = QI._parts(other)
        if p is None:
            return other / complex(self) if isinstance(other, numbers.Number) else NotImplemented
        return QI(*p) / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return complex(self) ** n
        if n < 0:
            return 1 / (self ** -n)
        out, base = Fraction(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        return QI.make(self.re, -self.im)

    def __abs__(self):
        return abs(complex(self))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __eq__(self, other):
        p = QI._parts(other)
        if p is None:
            if isinstance(other, numbers.Number):
                return complex(self) == other
            return NotImplemented
        return self.re == p[0] and self.im == p[1]

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __repr__(self):
        return f"QI({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)


I = QI(0, 1)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QI))


def exact(x):
    """Coerce ints to Fraction; leave other exact scalars alone."""
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (Fraction, QI)):
        return x
    raise TypeError(f"{x!r} is not an exact scalar")


def to_complex(x) -> complex:
    return complex(x)


def conj(x):
    if isinstance(x, Fraction) or isinstance(x, int):
        return x
    return x.conjugate()


def is_zero(x, tol=None) -> bool:
    """Exact zero test, or ``|x| <= tol`` when a tolerance is given."""
    if tol is None:
        return x == 0
    return abs(x) <= tol


def magnitude(x) -> float:
    """Cheap size used for pivot choice."""
    if isinstance(x, Fraction):
        return abs(float(x))
    return abs(complex(x))


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_numeric(x: float) -> str:
    return "%.15g" % x


def format_scalar(x) -> str:
    """Fraction literal for exact scalars, 15 significant digits otherwise."""
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return _frac_str(x)
    if isinstance(x, QI):
        if x.re == 0:
            return f"{_frac_str(x.im)}*i"
        sign = "+" if x.im > 0 else "-"
        return f"{_frac_str(x.re)}{sign}{_frac_str(abs(x.im))}*i"
    z = complex(x)
    if z.imag == 0:
        return format_numeric(z.real)
    if z.real == 0:
        return f"{format_numeric(z.imag)}*i"
    sign = "+" if z.imag >= 0 else "-"
    return f"{format_numeric(z.real)}{sign}{format_numeric(abs(z.imag))}*i"


# literal parsing -----------------------------------------------------------

_CONSTANTS = {"i": I, "I": I, "j": I}


def _eval_scalar_node(node):
    if isinstance(node, ast.Expression):
        return _eval_scalar_node(node.body)
    if isinstance(node, ast.Constant):
        v = node.value
        if isinstance(v, bool):
            raise ValueError("boolean literal")
        if isinstance(v, int):
            return Fraction(v)
        if isinstance(v, float):
            return complex(v)
        if isinstance(v, complex):
            return v
        raise ValueError(f"unsupported literal {v!r}")
    if isinstance(node, ast.Name):
        if node.id in _CONSTANTS:
            return _CONSTANTS[node.id]
        if node.id == "pi":
            return complex(math.pi)
        raise ValueError(f"unknown name {node.id!r}")
    if isinstance(node, ast.UnaryOp):
        v = _eval_scalar_node(node.operand)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
    if isinstance(node, ast.BinOp):
        a = _eval_scalar_node(node.left)
        b = _eval_scalar_node(node.right)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            return a / b
        if isinstance(node.op, ast.Pow):
            if isinstance(b, Fraction) and b.denominator == 1:
                return a ** int(b)
            return complex(a) ** complex(b)
    raise ValueError(f"cannot parse scalar expression: {ast.dump(node)}")


def parse_scalar(text):
    """Parse ``"a/b"``, ``"a/b+c/d*i"`` or a float literal.

    Ints and floats coming straight from JSON are accepted too.
    """
    if isinstance(text, bool):
        raise ValueError("boolean is not a scalar")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return complex(text)
    if not isinstance(text, str):
        raise ValueError(f"scalar literal must be a string or number, got {type(text).__name__}")
    src = text.strip().replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"malformed scalar literal {text!r}") from exc
    v = _eval_scalar_node(tree)
    if isinstance(v, complex) and v.imag == 0:
        return complex(v.real)
    return v
