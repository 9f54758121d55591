"""Shared generators for the test suite."""
from __future__ import annotations

import random
from fractions import Fraction

from singcurve import krichever
from singcurve.gendiv import ModuleError, module_closure
from singcurve.jetalg import INF, Poly, RationalFunction

T = RationalFunction.var()
ZERO, ONE = Fraction(0), Fraction(1)


def t_power(k: int, c=ONE) -> RationalFunction:
    if k >= 0:
        return RationalFunction(Poly(tuple([ZERO] * k + [Fraction(c)])))
    return RationalFunction.pole(ZERO, -k) * Fraction(c)


def random_laurent(rng: random.Random, lo: int, hi: int, span: int = 3) -> RationalFunction:
    f = RationalFunction.const(ZERO)
    for k in range(lo, hi):
        c = rng.randint(-span, span)
        if c:
            f = f + t_power(k, c)
    return f


def random_divisor_stalk(ring, rng: random.Random, lo: int = -2, hi: int = 3):
    """Module generated by one to three random Laurent germs; never degenerate."""
    b = ring.branches
    gens = []
    for _ in range(rng.randint(1, 3)):
        g = tuple(random_laurent(rng, lo, hi) for _ in range(b))
        if not all(x.is_zero() for x in g):
            gens.append(g)
    while True:
        try:
            return module_closure(ring, gens)
        except ModuleError:
            gens.append(tuple(t_power(rng.randint(lo, hi)) for _ in range(b)))


def random_rational_value(rng: random.Random, avoid=()):
    while True:
        v = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        if v not in avoid:
            return v


def random_ml_instance(rng: random.Random, curve):
    """Random principal parts at one to three points; half are projected to zero pairing."""
    k = rng.randint(1, 3)
    pts = []
    avoid = {Fraction(0)}
    for _ in range(k):
        p = random_rational_value(rng, avoid)
        avoid.add(p)
        pts.append(("w", p))
    parts = [tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(rng.randint(1, 3))) for _ in pts]
    d = krichever.distribution(curve, pts, parts)
    if rng.random() < 0.5:
        # project onto the kernel of the pairing with a correction at the first point
        pr = krichever.ml_pair_all(d)[0]
        unit = krichever.ml_pair_all(krichever.distribution(curve, pts[:1], [(1,)]))[0]
        first = list(parts[0]) + [Fraction(0)]
        first[0] -= pr / unit
        parts[0] = tuple(first)
        d = krichever.distribution(curve, pts, parts)
    return d


def regular_sweep(curve, point, lo=-3, hi=5):
    from singcurve.globalcurve import make_divisor

    return [make_divisor(curve, [(point, k)]) if k else make_divisor(curve) for k in range(lo, hi + 1)]


__all__ = ["INF", "T", "random_divisor_stalk", "random_laurent", "random_ml_instance", "random_rational_value", "regular_sweep", "t_power"]
