import dataclasses
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmodules.algebra import get_field
from tmodules.duality import dual_via_reduction
from tmodules.extcalc import (
    BiderState,
    CoeffTransform,
    NoForwardPivot,
    ReductionError,
    action_matrix,
    certificate_sum,
    generic_strategy,
    inner_biderivation,
    reduce,
    strictly_pure_strategy,
)
from tmodules.samples import nilpotent_example, random_strictly_pure
from tmodules.skew import SkewPoly, mat_inverse
from tmodules.tmodule import drinfeld


def random_state(rng, width, p, max_degree=4, terms=4):
    # twisting multiplies T-degrees by p^k, so keep tau-degrees modest
    F = get_field(p)
    st_ = BiderState(width, p)
    for _ in range(terms):
        st_.add_term(rng.randrange(width), rng.randint(0, max_degree),
                     F.random_element(rng, 1, 0.2))
    return st_


def test_inner_biderivation_rank_two():
    # U = [c] on theta + a tau + tau^2 gives (c a - c^(1)) tau + c tau^2
    F = get_field(3)
    a = F("T + 2")
    phi = drinfeld([a, 1], 3)
    U = BiderState.symbolic_slot(1, 0, 0, 3)
    delta = inner_biderivation(U, phi)
    assert delta.get(0, 0) is None
    assert delta.get(0, 1) == CoeffTransform(SkewPoly([a, -F.one], 3))
    assert delta.get(0, 2) == CoeffTransform.unit(3)


def test_inner_biderivation_of_zero():
    phi = drinfeld(["T", 1], 5)
    assert inner_biderivation(BiderState(1, 5), phi).is_zero()


def test_generator_leads_at_its_column():
    rng = random.Random(3)
    phi = random_strictly_pure(rng, 3, 3, 3)
    P = mat_inverse(phi.leading)
    for i in range(3):
        for k in range(3):
            U = BiderState(3, 3)
            for j in range(3):
                U.add_term(j, k, CoeffTransform.unit(3).scale(P[i][j].twist(k)))
            delta = inner_biderivation(U, phi)
            assert delta.max_degree == 3 + k
            top = {j: v for j, deg, v in delta.terms() if deg == 3 + k}
            assert top == {i: CoeffTransform.unit(3)}


def test_transform_twist_rule():
    F = get_field(5)
    w = CoeffTransform(SkewPoly([F.theta, F.one], 5))
    c = F("T^2 + 1 / T")
    assert w.twist(1).evaluate(c) == w.evaluate(c) ** 5
    assert w.scale(F.theta).evaluate(c) == F.theta * w.evaluate(c)
    assert w.twist(2).untwist(2) == w
    assert w.untwist(1) is None


@settings(max_examples=40)
@given(seed=st.integers(0, 10**6))
def test_inner_classes_vanish(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3, 5])
    d, n = rng.randint(1, 2), rng.randint(2, 3)
    phi = random_strictly_pure(rng, p, d, n, nilpotent=rng.random() < 0.3)
    U = random_state(rng, d, p, max_degree=2)
    delta = inner_biderivation(U, phi)
    strategy = strictly_pure_strategy(phi)
    red = reduce(delta, phi, strategy, "full")
    assert red.state.is_zero()
    assert certificate_sum(red.certificate, phi, strategy) == delta


@settings(max_examples=40)
@given(seed=st.integers(0, 10**6), shape=st.sampled_from(["full", "zero"]))
def test_reduction_is_canonical(seed, shape):
    rng = random.Random(seed)
    p = rng.choice([2, 3, 5])
    d, n = rng.randint(1, 3), rng.randint(2, 3)
    phi = random_strictly_pure(rng, p, d, n)
    strategy = strictly_pure_strategy(phi)
    state = random_state(rng, d, p, max_degree=n + 2)
    if shape == "zero":
        state = state - BiderState(d, p, [{0: v} if (v := c.get(0)) else {}
                                          for c in state.entries])
    red = reduce(state, phi, strategy, shape)
    sh = strategy.shape(shape)
    assert all(sh.contains(j, k) for j, k, _ in red.state.terms())
    assert state - red.state == certificate_sum(red.certificate, phi, strategy)
    again = reduce(red.state, phi, strategy, shape)
    assert again.state == red.state and again.passes == 0


@settings(max_examples=25)
@given(seed=st.integers(0, 10**6))
def test_evaluation_commutes_with_reduction(seed):
    rng = random.Random(seed)
    p = rng.choice([2, 3, 5])
    d, n = rng.randint(1, 2), rng.randint(2, 3)
    phi = random_strictly_pure(rng, p, d, n)
    strategy = strictly_pure_strategy(phi)
    F = get_field(p)
    sym = BiderState.symbolic_slot(d, rng.randrange(d), rng.randint(0, n + 1), p)
    sym = sym.left_mul(SkewPoly([F.theta, F.one], p))
    c = F.random_nonzero(rng, 1, 0.3)
    after = reduce(sym, phi, strategy, "full").state.evaluate(c)
    before = reduce(sym.evaluate(c), phi, strategy, "full").state
    assert after == before


def test_generic_matches_strictly_pure():
    rng = random.Random(11)
    for _ in range(10):
        p = rng.choice([3, 5])
        phi = random_strictly_pure(rng, p, 2, 2)
        sp, gen = strictly_pure_strategy(phi), generic_strategy(phi)
        assert sp.shape("full") == gen.shape("full")
        state = random_state(rng, 2, p, max_degree=4)
        assert reduce(state, phi, sp, "full").state == reduce(state, phi, gen, "full").state


def test_degree_one_has_no_strategy():
    with pytest.raises(ReductionError):
        strictly_pure_strategy(drinfeld([1], 3))


def test_nilpotent_source_shape():
    # one extra canonical slot at the top degree for the generator that is not in Der_0
    phi = nilpotent_example(3, 1)
    shape = strictly_pure_strategy(phi).shape("zero")
    assert shape.slots() == [(0, 1), (0, 2), (1, 1), (1, 2), (2, 1), (2, 2), (2, 3)]


def test_backward_pivot_without_root():
    dual = dual_via_reduction(nilpotent_example(3, 1))
    strategy = generic_strategy(dual)
    back = [c for c, pv in strategy.pivots.items() if pv.exponent > 0]
    assert back == [4]
    F = get_field(3)
    state = BiderState.unit(7, 4, 1, F.theta)
    with pytest.raises(NoForwardPivot):
        reduce(state, dual, strategy, "zero")
    cube = BiderState.unit(7, 4, 1, F("T^3"))
    assert reduce(cube, dual, strategy, "zero").state.get(4, 1) is None


def test_state_outside_domain():
    phi = drinfeld(["T", 1], 3)
    strategy = strictly_pure_strategy(phi)
    with pytest.raises(ReductionError):
        reduce(BiderState.unit(1, 0, 0, get_field(3).one), phi, strategy, "zero")


def test_broken_pivot_detected():
    phi = drinfeld(["T", 1], 3)
    strategy = strictly_pure_strategy(phi)
    F = get_field(3)
    bad = dataclasses.replace(strategy.pivots[0], alpha=F("2"))
    strategy.pivots[0] = bad
    with pytest.raises(ReductionError):
        reduce(BiderState.unit(1, 0, 4, F.one), phi, strategy, "full")


def test_action_matrix_needs_matching_basis():
    phi = drinfeld(["T", 1], 3)
    strategy = strictly_pure_strategy(phi)
    with pytest.raises(ValueError):
        action_matrix(phi, strategy, "zero", basis=[(0, 0)])
