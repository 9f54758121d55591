import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singcurve.fixtures import (
    all_fixtures,
    cusp_obar_divisor,
    fix_3pt,
    fix_cusp,
    fix_node,
    fix_two_lines,
    fixture_divisors,
)
from singcurve.globalcurve import (
    CurveError,
    Point,
    Singularity,
    build_curve,
    gorenstein_report,
    h0,
    h0_forms,
    make_divisor,
    omega_divisor,
    pairing_matrix,
    regular_forms_stalk,
    residue_pairing_global,
    rr_serre_check,
)
from singcurve.jetalg import RationalFunction, parse_rational
from singcurve.localring import conductor, delta_invariant, ring_from_divisor

from helpers import random_rational_value

W = RationalFunction.var()
Z = RationalFunction.var()


def test_genus_bookkeeping():
    assert fix_node().arithmetic_genus == 1
    assert fix_cusp().arithmetic_genus == 1
    assert fix_3pt().arithmetic_genus == 2
    two = fix_two_lines()
    assert two.delta == 1 and two.connected and two.arithmetic_genus == 0


def test_build_curve_validation():
    ring = ring_from_divisor([1, 1])
    with pytest.raises(CurveError):
        build_curve(["w"], [Point("a", "w", F(0))], [Singularity("q", ("a",), ring)])
    with pytest.raises(CurveError):
        build_curve(["w"], [Point("a", "w", F(0)), Point("b", "w", F(0))])
    with pytest.raises(CurveError):
        build_curve(["w"], [Point("a", "x", F(0))])


def test_regular_forms_span():
    node = h0_forms(fix_node(), omega_divisor(fix_node(), make_divisor(fix_node())))
    assert node.dim == 1
    g = node.functions[0]["w"]
    assert (g * W).num.degree == 0 and (g * W).den.degree == 0
    cusp = h0_forms(fix_cusp(), omega_divisor(fix_cusp(), make_divisor(fix_cusp())))
    assert cusp.dim == 1
    g = cusp.functions[0]["w"]
    assert (g * W * W).den.degree == 0
    assert h0_forms(fix_3pt(), omega_divisor(fix_3pt(), make_divisor(fix_3pt()))).dim == 2


@pytest.mark.parametrize("name", list(all_fixtures()))
def test_forms_count_the_genus(name):
    curve = all_fixtures()[name]
    fd = omega_divisor(curve, make_divisor(curve))
    assert h0_forms(curve, fd).dim == curve.arithmetic_genus
    assert h0(curve, make_divisor(curve)).dim == curve.connected_components


def test_known_section_counts():
    node = fix_node()
    assert h0(node, make_divisor(node, [(("w", F(2)), 1)])).dim == 1
    cusp = fix_cusp()
    assert h0(cusp, make_divisor(cusp, [(("w", F(1)), 3)])).dim == 3


def test_sections_verify_and_anchors_agree():
    node = fix_node()
    div = make_divisor(node, [(("w", F(2)), 3)])
    base = h0(node, div)
    alt = h0(node, div, anchors={"w": F(5)})
    assert base.verify() and alt.verify()
    assert base.dim == alt.dim == 3


@pytest.mark.parametrize("name", ["node", "cusp", "3pt", "two-lines", "triple", "tacnode"])
def test_riemann_roch_sweep(name):
    curve = all_fixtures()[name]
    pt = (curve.components[0], F(7))
    for k in range(-3, 6):
        div = make_divisor(curve, [(pt, k)]) if k else make_divisor(curve)
        rep = rr_serre_check(curve, div, test_point=(curve.components[0], F(11)))
        assert rep["riemann_roch"] and rep["omega_degree_ok"], (name, k, rep)
        assert rep["h1_monotone"] is not False and rep["nested_index"]


@pytest.mark.parametrize("name", ["node", "cusp", "3pt", "triple"])
def test_riemann_roch_on_stalk_divisors(name):
    curve = all_fixtures()[name]
    for label, div in fixture_divisors(name, curve).items():
        assert rr_serre_check(curve, div)["ok"], label


def test_cusp_obar_global():
    curve = fix_cusp()
    div = cusp_obar_divisor(curve)
    assert div.degree == 1
    assert omega_divisor(curve, div).degree == -1


def test_geometric_genus_corollary_needs_an_effective_divisor():
    # degree 0 but not effective: no sections even though deg >= geometric genus
    node = fix_node()
    div = make_divisor(node, [(("w", F(2)), 1), (("w", F(3)), -1)])
    rep = rr_serre_check(node, div)
    assert rep["degree"] == 0 and rep["h0"] == 0
    assert rep["geometric_genus_corollary"] is False
    assert rep["riemann_roch"]


@given(st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_euler_characteristic_is_additive(seed):
    rng = random.Random(seed)
    curve = [fix_node(), fix_cusp(), fix_3pt()][seed % 3]
    avoid = {F(0), F(1)}
    p = random_rational_value(rng, avoid)
    q = random_rational_value(rng, avoid | {p})
    a, b = rng.randint(-3, 3), rng.randint(-3, 3)
    d1 = make_divisor(curve, [(("w", p), a)])
    d2 = make_divisor(curve, [(("w", p), a), (("w", q), b)])

    def chi(d):
        return h0(curve, d).dim - h0_forms(curve, omega_divisor(curve, d)).dim

    assert chi(d2) - chi(d1) == d2.degree - d1.degree == b


def test_residue_pairing_values():
    node = fix_node()
    form = {"w": 1 / W}
    assert residue_pairing_global(node, [(("w", F(1)), 1 / Z)], form) == 1
    assert residue_pairing_global(node, [(("w", F(1)), -1 / Z)], form) == -1
    assert residue_pairing_global(node, [(("w", F(1)), 1 / (Z * Z) + 1 / Z)], {"w": parse_rational("1/w")}) == 0
    assert residue_pairing_global(node, [(("w", F(1)), 1 / (Z * Z))], form) == -1


@pytest.mark.parametrize("name", list(all_fixtures()))
def test_stalk_pairing_is_nondegenerate(name):
    for s in all_fixtures()[name].singularities:
        d = delta_invariant(s.ring)
        M, r = pairing_matrix(s.ring)
        assert len(M) == d and r == d


@pytest.mark.parametrize(
    "mults, delta, n, free",
    [([1, 1], 1, 2, True), ([2], 1, 2, True), ([1, 1, 1], 2, 3, False), ([3], 2, 3, False), ([2, 2], 3, 4, False)],
)
def test_gorenstein_table(mults, delta, n, free):
    rep = gorenstein_report(ring_from_divisor(mults))
    assert (rep["delta"], rep["n"], rep["omega_free"]) == (delta, n, free)
    assert rep["bounds_ok"] and rep["iff_ok"]


def test_form_stalk_agrees_with_the_residue_dual():
    for mults in ([1, 1], [2], [1, 1, 1], [3], [2, 3]):
        ring = ring_from_divisor(mults)
        fs = regular_forms_stalk(ring)
        assert fs.agrees_with_dual
        assert fs.quotient_dim == delta_invariant(ring)
        wide = regular_forms_stalk(ring, pole_bound=2 * delta_invariant(ring) + 4)
        assert wide.quotient_dim == fs.quotient_dim


def test_conductor_bounds_on_fixtures():
    for curve in all_fixtures().values():
        for s in curve.singularities:
            d, n = delta_invariant(s.ring), conductor(s.ring).n
            assert d + 1 <= n <= 2 * d or d == n == 0
