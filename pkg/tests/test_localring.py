from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singcurve.jetalg import MultiJet, StalkSubspace, full, lattice_equal, span_jets
from singcurve.localring import (
    AmbientStalk,
    TruncationTooSmall,
    check_ring_axioms,
    conductor,
    delta_invariant,
    radical,
    ring_from_divisor,
    rings_equal,
    smooth_ring,
    subalgebra_closure,
)

from helpers import T, t_power

ZERO = T * 0


def test_radical_windows():
    assert radical(AmbientStalk(1, 3)).dim == 2
    assert radical(AmbientStalk(2, 2)).dim == 2


def test_cusp_closure():
    ring = subalgebra_closure(AmbientStalk(1, 6), [(t_power(2),), (t_power(3),)])
    assert ring.m == 2
    assert delta_invariant(ring) == 1
    assert not ring.contains((T,))
    assert ring.contains((t_power(5),))


def test_node_closure():
    ring = subalgebra_closure(AmbientStalk(2, 3), [(T, ZERO), (ZERO, T)])
    assert ring.m == 1
    assert rings_equal(ring, ring_from_divisor([1, 1]))


def test_one_branch_coordinate_does_not_reach_the_other_branch():
    # (t, 0) alone gives C + t C{t} on the first branch only: infinite delta
    with pytest.raises(TruncationTooSmall):
        subalgebra_closure(AmbientStalk(2, 3), [(T, ZERO)], max_restarts=2)


def test_constants_alone_never_certify_two_branches():
    with pytest.raises(TruncationTooSmall):
        subalgebra_closure(AmbientStalk(2, 3), [], max_restarts=1)


@pytest.mark.parametrize(
    "mults, delta",
    [([1, 1], 1), ([2], 1), ([1, 1, 1], 2), ([3], 2), ([2, 2], 3), ([1, 2, 3, 1], 6)],
)
def test_delta_of_multiple_points(mults, delta):
    assert delta_invariant(ring_from_divisor(mults)) == delta


@given(st.lists(st.integers(1, 4), min_size=1, max_size=4))
@settings(max_examples=40, deadline=None)
def test_delta_formula(mults):
    assert delta_invariant(ring_from_divisor(mults)) == sum(mults) - 1


@pytest.mark.parametrize("mults, n_q", [([1, 1], 2), ([2], 2), ([1, 1, 1], 3)])
def test_conductor(mults, n_q):
    c = conductor(ring_from_divisor(mults))
    assert c.n == n_q
    b = len(mults)
    if mults == [2]:
        assert lattice_equal(c.ideal, StalkSubspace(1, 2, 2, (), (), 2))
    else:
        assert lattice_equal(c.ideal, StalkSubspace(b, 1, 1, (), (), 1))


def test_axioms_on_cusp():
    rep = check_ring_axioms(ring_from_divisor([2]))
    assert rep["chain"] and rep["conductor_inside"] and rep["remark_identity"]
    assert rep["remark_dim"] == 1


def test_axioms_on_smooth_point():
    ring = smooth_ring(1)
    rep = check_ring_axioms(ring)
    assert rep["chain"] and rep["inside_c_plus_r"]
    assert lattice_equal(conductor(ring).ideal, full(1, 0))
    assert delta_invariant(ring) == 0
    assert conductor(ring).n == 0


def test_branch_separating_space_is_rejected():
    one = MultiJet.constant(F(1), 2, 1)
    sep = MultiJet.from_coords((F(1), F(-1)), 2, 0, 1)
    space = span_jets([one, sep], 2, 0, 1, stable=1)
    assert check_ring_axioms(space)["inside_c_plus_r"] is False
    assert lattice_equal(space.canonical(), full(2, 0))
