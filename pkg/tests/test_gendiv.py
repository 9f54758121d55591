import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singcurve.gendiv import (
    ModuleError,
    branch_orders,
    degree_at,
    degrees_agree,
    free_degree_check,
    is_locally_free,
    minimal_generators,
    module_closure,
    over_module,
    preimage_value_rank,
    times_unit,
)
from singcurve.jetalg import full, lattice_equal
from singcurve.localring import ring_from_divisor, smooth_ring
from singcurve.middleding import an_model

from helpers import T, random_divisor_stalk, t_power

ONE = T * 0 + 1
ZERO = T * 0
CUSP = ring_from_divisor([2])
NODE = ring_from_divisor([1, 1])
TRIPLE = ring_from_divisor([1, 1, 1])


def test_cusp_obar_is_generated_by_one_and_t():
    d = module_closure(CUSP, [(ONE,), (T,)])
    assert lattice_equal(d.space, full(1, 0))
    assert degree_at(d) == 1
    assert branch_orders(d) == [0]
    v = is_locally_free(d)
    assert not v.free and v.min_generators == 2


def test_cusp_inverse_t_is_free():
    d = module_closure(CUSP, [(1 / T,)])
    v = is_locally_free(d)
    assert v.free
    assert lattice_equal(module_closure(CUSP, [v.generator]).space, d.space)
    assert degree_at(d) == 1


def test_ring_as_divisor():
    for ring in (CUSP, NODE, TRIPLE):
        d = module_closure(ring, [tuple(ONE for _ in range(ring.branches))])
        assert lattice_equal(d.space, ring.space)
        assert degree_at(d) == 0
        assert not d.in_support
        assert preimage_value_rank(d) == 1
        assert is_locally_free(d).free


def test_obar_degrees():
    assert degree_at(module_closure(TRIPLE, [(ONE, ZERO, ZERO), (ZERO, ONE, ZERO), (ZERO, ZERO, ONE)])) == 2
    d = module_closure(NODE, [(ONE, ZERO), (ZERO, ONE)])
    assert preimage_value_rank(d) == 2


def test_node_free_divisor():
    d = module_closure(NODE, [(1 / T, ONE)])
    assert is_locally_free(d).free
    assert branch_orders(d) == [-1, 0]
    assert degree_at(d) == 1
    rep = free_degree_check(d, (1 / T, ONE))
    assert rep["ok"] and rep["branch_sum"] == 1


def test_smooth_pole():
    d = module_closure(smooth_ring(), [(t_power(-2),)])
    assert branch_orders(d) == [-2] and degree_at(d) == 2


def test_generators_must_touch_every_branch():
    with pytest.raises(ModuleError):
        module_closure(NODE, [(T, ZERO)])


def test_nakayama_count():
    assert minimal_generators(module_closure(CUSP, [(ONE,), (T,)])) == 2
    assert minimal_generators(module_closure(TRIPLE, [(ONE, ZERO, ZERO), (ZERO, ONE, ZERO), (ZERO, ZERO, ONE)])) == 3


@given(st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_degree_is_independent_of_the_over_module(seed):
    rng = random.Random(seed)
    ring = [CUSP, NODE, TRIPLE, an_model(3).ring, an_model(4).ring][seed % 5]
    d = random_divisor_stalk(ring, rng)
    assert degrees_agree(d)
    wide = over_module(d, extra_shift=2)
    assert degree_at(d) == degree_at(d, wide)


@given(st.integers(0, 10**6), st.integers(-2, 2))
@settings(max_examples=30, deadline=None)
def test_twisting_by_a_uniformiser_power_shifts_the_degree(seed, k):
    rng = random.Random(seed)
    d = random_divisor_stalk(CUSP, rng)
    shifted = times_unit(d, (t_power(-k),))
    assert degree_at(shifted) == degree_at(d) + k
