import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singcurve.fixtures import fix_cusp, fix_multiple_point, fix_node
from singcurve.globalcurve import Point, Singularity, build_curve
from singcurve.jetalg import INF, QI, RationalFunction, parse_rational
from singcurve.krichever import (
    PrincipalPart,
    UnsupportedConstruct,
    birkhoff_split,
    case_classify,
    cycle_gaps,
    distribution,
    flow_classify,
    kdv_preset,
    kp_preset,
    ml_pair_all,
    ml_solve,
    nls_preset,
    verify_solution,
)
from singcurve.localring import ring_from_divisor

from helpers import random_ml_instance

Q1 = ("w", F(1))
W = RationalFunction.var()


def test_simple_pole_is_obstructed():
    d = distribution(fix_node(), [Q1], [(1,)])
    assert ml_pair_all(d) == [1]
    assert ml_solve(d) is None


def test_double_pole_is_solvable():
    d = distribution(fix_node(), [Q1], [(1, 1)])
    assert ml_pair_all(d) == [0]
    f = ml_solve(d)
    assert f["w"] == parse_rational("w/(w-1)**2")
    assert verify_solution(d, f)


def test_simple_pole_flow():
    v = flow_classify(distribution(fix_node(), [Q1], [(1,)]), T=1)
    assert v.kind == "periodic" and v.period == 1
    assert v.gaps == (-1,)
    for t in (-3, 0, 1, 2, 7):
        assert v.trivial_at(F(t))
    for t in (F(1, 2), F(1, 3), F(-5, 2)):
        assert not v.trivial_at(t)
    assert v.trivial_at(2.0) and not v.trivial_at(0.5)


def test_irrational_multiple_is_aperiodic_for_unit_period():
    v = flow_classify(distribution(fix_node(), [Q1], [(2 ** 0.5,)]), T=1)
    assert v.kind == "aperiodic-on-budget"


def test_inferred_period():
    v = flow_classify(distribution(fix_node(), [Q1], [(F(3, 2),)]))
    assert v.kind == "periodic" and v.period == F(3, 2)


def test_cusp_flow_is_unsupported():
    d = distribution(fix_cusp(), [Q1], [(1,)])
    assert ml_solve(d) is None
    assert flow_classify(d).kind == "unsupported"
    with pytest.raises(UnsupportedConstruct):
        cycle_gaps(d)


def test_two_cycles():
    ring = ring_from_divisor([1, 1])
    curve = build_curve(
        ["u", "v"],
        [Point("a0", "u", F(0)), Point("b0", "v", F(0)), Point("a1", "u", INF), Point("b1", "v", INF)],
        [Singularity("q0", ("a0", "b0"), ring), Singularity("q1", ("a1", "b1"), ring)],
    )
    d = distribution(curve, [("u", F(1))], [(1,)])
    assert ml_solve(d) is None
    assert len(cycle_gaps(d)) == 1
    assert flow_classify(d).kind == "periodic"


def test_birkhoff():
    h = parse_rational("(w**3 + 1)/w**2")
    plus, minus = birkhoff_split(h)
    assert plus == W
    assert minus.coeffs == (0, 1)
    assert plus + minus.as_function() == h


def test_presets_on_the_node():
    node = fix_node()
    assert case_classify(*kdv_preset(node, Q1)).case == 3
    kp = case_classify(*kp_preset(node, Q1))
    assert kp.case is None and kp.second.kind == "aperiodic-on-budget"
    nls = case_classify(*nls_preset(node, ("w", QI(0, 1)), ("w", QI(0, -1))))
    assert nls.case == 2
    assert nls.first.kind == "trivial" and nls.second.period == 2


def test_h_plus_data_pairs_to_zero():
    # principal parts of a function on the node (equal values at 0 and infinity) pair to zero
    node = fix_node()
    f = parse_rational("(w**2 + 3*w)/((w-1)**2*(w-2))")
    parts = []
    for p in (F(1), F(2)):
        j = f.expand_at(p, 0)
        parts.append(tuple(j.coeff(-k) for k in range(1, -j.low + 1)))
    d = distribution(node, [("w", F(1)), ("w", F(2))], parts)
    assert ml_pair_all(d) == [0]
    g = ml_solve(d)
    assert g is not None and (g["w"] - f).is_polynomial() and (g["w"] - f).num.degree <= 0


@given(st.integers(0, 10**9))
@settings(max_examples=100, deadline=None)
def test_solvable_iff_pairings_vanish(seed):
    rng = random.Random(seed)
    curve = fix_node() if seed % 2 else fix_cusp()
    d = random_ml_instance(rng, curve)
    solved = ml_solve(d, check=False)
    zero = all(v == 0 for v in ml_pair_all(d))
    assert (solved is not None) == zero
    if solved is not None:
        assert verify_solution(d, solved)


@given(st.integers(0, 10**9), st.fractions(-3, 3, max_denominator=4))
@settings(max_examples=40, deadline=None)
def test_pairing_is_linear(seed, s):
    rng = random.Random(seed)
    curve = fix_node()
    a = random_ml_instance(rng, curve)
    b = distribution(curve, a.marked, [PrincipalPart((F(rng.randint(-3, 3)),)) for _ in a.marked])
    lhs = ml_pair_all(a + b.scale(s))
    rhs = [x + s * y for x, y in zip(ml_pair_all(a), ml_pair_all(b))]
    assert lhs == rhs


def test_pairing_map_is_onto_forms():
    # one simple pole already hits the one-dimensional dual of H^1
    for curve in (fix_node(), fix_cusp(), fix_multiple_point([1, 1])):
        d = distribution(curve, [("w", F(5))], [(1,)])
        assert any(v != 0 for v in ml_pair_all(d))
