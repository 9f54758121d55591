"""Named example curves and divisors."""
from __future__ import annotations

from fractions import Fraction

from .gendiv import DivisorStalk
from .globalcurve import GeneralisedDivisor, Point, RationalSingularCurve, Singularity, build_curve, make_divisor
from .jetalg import INF, RationalFunction
from .localring import ring_from_divisor
from .middleding import an_model, eigen_curve, fix_triple_spec

T = RationalFunction.var()
ZERO, ONE, TWO = Fraction(0), Fraction(1), Fraction(2)


def fix_node() -> RationalSingularCurve:
    """``w = 0`` glued to ``w = infinity``."""
    return build_curve(
        ["w"],
        [Point("p0", "w", ZERO), Point("pinf", "w", INF)],
        [Singularity("q", ("p0", "pinf"), ring_from_divisor([1, 1]))],
    )


def fix_cusp() -> RationalSingularCurve:
    return build_curve(["w"], [Point("p0", "w", ZERO)], [Singularity("q", ("p0",), ring_from_divisor([2]))])


def fix_3pt() -> RationalSingularCurve:
    """Three points ``0, 1, infinity`` of one line glued transversally."""
    return build_curve(
        ["w"],
        [Point("a", "w", ZERO), Point("b", "w", ONE), Point("c", "w", INF)],
        [Singularity("q", ("a", "b", "c"), ring_from_divisor([1, 1, 1]))],
    )


def fix_multiple_point(mults) -> RationalSingularCurve:
    """Branches ``w = 0, 1, 2, ...`` of one line glued with ring ``C + sum t_i^{n_i} C{t_i}``."""
    pts = [Point(f"p{i}", "w", Fraction(i)) for i in range(len(mults))]
    return build_curve(["w"], pts, [Singularity("q", tuple(p.name for p in pts), ring_from_divisor(mults))])


def fix_an(n: int) -> RationalSingularCurve:
    """The ``x^2 = y^n`` singularity placed on a line (two branches at 0 and infinity for even n)."""
    model = an_model(n)
    if model.branches == 1:
        pts = [Point("p0", "w", ZERO)]
    else:
        pts = [Point("p0", "w", ZERO), Point("pinf", "w", INF)]
    return build_curve(["w"], pts, [Singularity("q", tuple(p.name for p in pts), model.ring)])


def fix_two_lines() -> RationalSingularCurve:
    """Two lines meeting in one node."""
    return build_curve(
        ["u", "v"],
        [Point("a", "u", ZERO), Point("b", "v", ZERO)],
        [Singularity("q", ("a", "b"), ring_from_divisor([1, 1]))],
    )


def fix_triple():
    """Eigenvalue curve of the 3x3 example: three sheets meeting over ``lambda = 0``.

    Returns the curve and the eigenvector divisor stalk.
    """
    ec = eigen_curve(fix_triple_spec())
    st = ec.stalks[0]
    comps = [f"s{i + 1}" for i in range(len(st.branch_indices))]
    pts = [Point(f"o{i + 1}", c, ZERO) for i, c in enumerate(comps)]
    curve = build_curve(comps, pts, [Singularity("q", tuple(p.name for p in pts), st.ring)])
    return curve, st.divisor


def cusp_obar_divisor(curve=None) -> GeneralisedDivisor:
    curve = curve or fix_cusp()
    return make_divisor(curve, stalks={"q": [ONE, T]})


def cusp_free_divisor(curve=None) -> GeneralisedDivisor:
    curve = curve or fix_cusp()
    return make_divisor(curve, stalks={"q": [1 / T]})


def node_pole_divisor(curve=None) -> GeneralisedDivisor:
    curve = curve or fix_node()
    return make_divisor(curve, [(("w", TWO), 1)])


def triple_divisor():
    curve, st = fix_triple()
    return curve, GeneralisedDivisor(curve, (), (("q", st),))


def all_fixtures() -> dict:
    """Curves used by the table-driven checks."""
    return {
        "node": fix_node(),
        "cusp": fix_cusp(),
        "3pt": fix_3pt(),
        "tacnode": fix_an(4),
        "a3": fix_an(3),
        "a5": fix_an(5),
        "two-lines": fix_two_lines(),
        "triple": fix_triple()[0],
    }


def fixture_divisors(name: str, curve: RationalSingularCurve) -> dict:
    """Named divisors shipped with each fixture file."""
    out = {"O": make_divisor(curve)}
    if name == "node":
        out["pole-at-2"] = node_pole_divisor(curve)
        out["gap"] = make_divisor(curve, stalks={"q": [(1 / T, ONE)]})
    elif name == "cusp":
        out["obar"] = cusp_obar_divisor(curve)
        out["inverse-t"] = cusp_free_divisor(curve)
        out["pole-at-1"] = make_divisor(curve, [(("w", ONE), 3)])
    elif name == "3pt":
        out["obar"] = make_divisor(curve, stalks={"q": [(ONE, ZERO, ZERO), (ZERO, ONE, ZERO), (ZERO, ZERO, ONE)]})
    elif name == "triple":
        _, st = fix_triple()
        out["eigen"] = GeneralisedDivisor(curve, (), (("q", DivisorStalk(curve.singularities[0].ring, st.space)),))
    return out
