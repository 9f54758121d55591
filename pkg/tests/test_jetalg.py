from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from singcurve.jetalg import (
    DEFAULT_TOL,
    INF,
    QI,
    CoordinateMismatch,
    FormJet,
    LaurentJet,
    MultiJet,
    RationalFunction,
    WindowError,
    colon,
    format_scalar,
    full,
    lattice_equal,
    lattice_mul,
    nullspace,
    parse_rational,
    parse_scalar,
    quotient_dim,
    rank,
    residue,
    residue_dual,
    rref,
    series_exp,
    series_inv,
    series_mul,
    span_jets,
)

fracs = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def jets(lo=-2, order=6):
    return st.builds(
        lambda low, cs: LaurentJet(low, tuple(cs), order),
        st.integers(lo, 1),
        st.lists(fracs, min_size=0, max_size=6),
    )


@given(jets(), jets(), jets())
def test_mul_associative(a, b, c):
    lhs, rhs = (a * b) * c, a * (b * c)
    k = min(lhs.order, rhs.order)
    assert lhs.truncate(k) == rhs.truncate(k)


@given(jets(), jets())
def test_mul_commutes(a, b):
    assert series_mul(a, b) == series_mul(b, a)


@given(st.lists(fracs, min_size=1, max_size=6).filter(lambda c: c[0] != 0))
def test_inverse_is_exact(cs):
    a = LaurentJet(0, tuple(cs), 6)
    assert series_mul(a, series_inv(a)) == LaurentJet(0, (F(1),), 6)


@given(st.lists(fracs, max_size=4), st.lists(fracs, max_size=4))
def test_exp_is_a_homomorphism(x, y):
    a, b = LaurentJet(1, tuple(x), 6), LaurentJet(1, tuple(y), 6)
    assert series_exp(a + b) == series_exp(a) * series_exp(b)


def test_product_window():
    a = LaurentJet(-1, (F(1), F(2), F(3)), 4)
    b = LaurentJet(0, (F(2), F(1)), 4)
    p = a * b
    assert p.order == 3
    assert [p.coeff(k) for k in range(-1, 3)] == [2, 5, 8, 3]


def test_mixed_coordinates_refused():
    with pytest.raises(CoordinateMismatch):
        LaurentJet(0, (F(1),), 3, "t") * LaurentJet(0, (F(1),), 3, "s")


def test_residue_needs_window():
    assert residue(FormJet(LaurentJet(-2, (F(1), F(7)), 2))) == 7
    with pytest.raises(WindowError):
        residue(LaurentJet(-3, (F(1),), -2))


def test_residue_sums_branches():
    j = MultiJet((LaurentJet(-1, (F(2),), 1), LaurentJet(-1, (F(-5),), 1)))
    assert residue(j) == -3


def test_gaussian_rationals():
    z = QI(1, 2)
    assert z * z.conjugate() == 5
    assert parse_scalar("1/2+3/4*i") == QI(F(1, 2), F(3, 4))
    assert format_scalar(parse_scalar("1/2-3/4*i")) == "1/2-3/4*i"
    assert isinstance(parse_scalar("0.25"), complex)


@given(fracs, fracs)
def test_scalar_round_trip(a, b):
    x = QI.make(a, b)
    assert parse_scalar(format_scalar(x)) == x


def test_rref_and_nullspace():
    rows, piv = rref([[F(1), F(2)], [F(2), F(4)]], 2)
    assert piv == [0] and rows == [(F(1), F(2))]
    assert nullspace([[F(1), F(2)]], 2) == [(F(-2), F(1))]
    assert rank([[1.0, 2.0], [2.0, 4.0 + 1e-14]], 2) == 2
    assert rank([[1.0, 2.0], [2.0, 4.0 + 1e-14]], 2, tol=DEFAULT_TOL) == 1


def test_rational_function_expansion():
    f = parse_rational("w/(w-1)**2")
    assert f.order_at(F(1)) == -2
    assert f.order_at(INF) == 1
    e = f.expand_at(F(1), 3)
    assert (e.coeff(-2), e.coeff(-1), e.coeff(0)) == (1, 1, 0)
    g = RationalFunction.pole(INF, 2)
    assert g.order_at(INF) == -2


def _lattice(b, jets_, lo, order):
    return span_jets(jets_, b, lo, order, stable=order).canonical()


def test_lattice_algebra_on_cusp():
    # C + t^2 C{t}: the endomorphisms of the normalisation lattice are the normalisation
    cusp = _lattice(1, [MultiJet.constant(F(1), 1, 2)], 0, 2)
    obar = full(1, 0)
    assert quotient_dim(obar, cusp) == 1
    assert lattice_equal(colon(obar, obar), obar)
    assert lattice_equal(lattice_mul(cusp, cusp), cusp)
    # forms pairing to zero with the cusp ring: t^-2 dt joins the holomorphic ones, t^-1 dt does not
    dual = residue_dual(cusp)
    assert dual.lo == -2 and quotient_dim(dual, obar) == 1
    assert dual.contains(MultiJet((LaurentJet(-2, (F(1),), 0),)))
    assert not dual.contains(MultiJet((LaurentJet(-1, (F(1),), 0),)))
