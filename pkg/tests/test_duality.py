import random

import pytest

from tmodules.algebra import get_field
from tmodules.duality import (
    DualData,
    DualityError,
    VerificationError,
    bidual,
    counterexample_demo,
    dual_closed_form,
    dual_morphism,
    dual_via_reduction,
    ext_full,
    ext_full_of_dual,
)
from tmodules.extcalc import BiderState, dual_special_strategy, reduce
from tmodules.samples import (
    nilpotent_example,
    random_conjugation,
    random_strictly_pure,
    worked_example,
    worked_example_expected,
)
from tmodules.skew import SkewMatrix, SkewPoly, identity_matrix
from tmodules.tmodule import Morphism, classify, conjugate, drinfeld

ALPHA = ["T", 1, "T + 1", 0]
BETA = [2, "T", "T^2", "1 / T"]


def test_rank_two_drinfeld_dual():
    # theta + a tau + tau^2 has dual theta - a tau + tau^2
    F = get_field(5)
    a = F("T^2 + 3")
    phi = drinfeld([a, 1], 5)
    expected = drinfeld([-a, 1], 5)
    assert dual_closed_form(phi) == expected
    assert dual_via_reduction(phi) == expected


def test_worked_example_matrices():
    phi = worked_example(3, ALPHA, BETA, "T")
    data = DualData(phi)
    exp = worked_example_expected(3, ALPHA, BETA, "T")
    assert data.A1 == exp["A1"]
    assert data.A2 == exp["A2"]
    assert data.s == exp["s"]
    F = get_field(3)
    assert data.a_hat[0][2] == F("T^3")


def test_worked_example_reduction_sequence():
    # t times the class of tau in coordinate 2 uses the generators
    # c^(1) E_1, c^(2) E_2 and c^(2) gamma^(2) E_4 of the A-hat family
    phi = worked_example(3, ALPHA, BETA, "T")
    data = DualData(phi)
    strategy = dual_special_strategy(data)
    seed = BiderState.symbolic_slot(4, 1, 1, 3).left_mul(SkewPoly([get_field(3).theta,
                                                                    get_field(3).one], 3))
    red = reduce(seed, data.dual, strategy, "zero")
    F = get_field(3)
    got = [(g.row, g.power, g.coeff.poly) for g in red.certificate]
    assert got == [
        (0, 0, SkewPoly.tau(3)),
        (1, 0, SkewPoly.tau(3, 2)),
        (3, 0, SkewPoly.monomial(F("T^9"), 2)),
    ]


def test_dual_dimensions_and_shape():
    rng = random.Random(2)
    for _ in range(15):
        p, d, n = rng.choice([2, 3, 5]), rng.randint(1, 3), rng.randint(2, 4)
        dual = dual_closed_form(random_strictly_pure(rng, p, d, n))
        c = classify(dual)
        assert (c.dim, c.deg_tau, c.has_nilpotence) == (d * (n - 1), 2, False)
        if n > 2:
            assert not c.strictly_pure


def test_preconditions():
    with pytest.raises(DualityError):
        dual_closed_form(drinfeld([1], 3))
    with pytest.raises(DualityError):
        dual_closed_form(nilpotent_example(3, 1))
    F = get_field(3)
    singular = ((F.one, F.zero), (F.zero, F.zero))
    from tmodules.tmodule import TModule
    with pytest.raises(DualityError):
        dual_closed_form(TModule([identity_matrix(2, 3, F.theta), singular, singular]))


def test_bidual_identity_leading():
    phi = drinfeld(["T", "T^2", 1], 3)
    assert bidual(phi).module == phi


def test_bidual_random():
    rng = random.Random(9)
    for _ in range(20):
        p, d, n = rng.choice([2, 3, 5]), rng.randint(1, 3), rng.randint(2, 4)
        phi = random_strictly_pure(rng, p, d, n)
        res = bidual(phi)
        assert res.module == conjugate(phi, phi.leading)


def test_ext_full_small():
    phi = drinfeld(["T", 1], 3)
    ext = ext_full(phi)
    F = get_field(3)
    assert ext.dim == 2
    assert ext.action[1, 0] == SkewPoly.tau(3)
    assert ext.action[0, 1].is_zero()
    assert ext.quotient == SkewMatrix.scalar(((F.theta,),))


def test_ext_of_dual_rank_two():
    phi = drinfeld(["T + 1", 1], 5)
    ext = ext_full_of_dual(phi)
    assert ext.dim == 2
    assert ext.sub == phi.phi_t


def test_ext_structures_random():
    rng = random.Random(4)
    for _ in range(10):
        p, d, n = rng.choice([2, 3]), rng.randint(1, 2), rng.randint(2, 3)
        phi = random_strictly_pure(rng, p, d, n)
        assert ext_full(phi).dim == n * d
        e = ext_full_of_dual(phi)
        assert e.dim == n * d and len(e.quotient_indices) == (n - 1) * d


def test_dual_of_identity_and_t():
    phi = worked_example(3, ALPHA, BETA, 0)
    dual = dual_closed_form(phi)
    ident = dual_morphism(Morphism.identity(phi))
    assert ident.matrix == SkewMatrix.identity(dual.dim, 3)
    mult_t = dual_morphism(Morphism(phi, phi, phi.phi_t))
    assert mult_t.matrix == dual.phi_t


def test_contravariance():
    rng = random.Random(6)
    for _ in range(5):
        phi = random_strictly_pure(rng, 3, 2, 2)
        f = random_conjugation(rng, phi)
        g = random_conjugation(rng, f.target)
        lhs = dual_morphism(g.compose(f))
        rhs = dual_morphism(f).compose(dual_morphism(g))
        assert lhs == rhs


def test_counterexample_dual_and_rejection():
    rep = counterexample_demo(3, 1)
    assert rep.dual_matches
    assert rep.not_a_tmodule
    F = get_field(3)
    assert rep.residue[2][2] == F("T^3 - T")


def test_verification_error_names_entry():
    phi = drinfeld(["T", 1], 3)
    from tmodules.duality import _assert_equal

    other = drinfeld(["T + 1", 1], 3)
    with pytest.raises(VerificationError) as info:
        _assert_equal(phi.phi_t, other.phi_t, "check")
    assert info.value.entry == (0, 0, 1)
