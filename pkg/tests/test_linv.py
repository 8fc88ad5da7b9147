from fractions import Fraction

import pytest

from padic_lfun.cli import CURVES
from padic_lfun.linv import (
    EllipticCurveData,
    ReductionTypeError,
    j_coefficients,
    l_invariant,
    mtt_check,
    quadratic_twist,
    tate_parameter,
    tate_residual,
)


def curve(key):
    return EllipticCurveData.from_ainvs(CURVES[key])


def test_j_expansion():
    assert j_coefficients(5) == (1, 744, 196884, 21493760, 864299970)


def test_invariants_11a():
    E = curve("11a")
    assert E.discriminant == -161051  # -11^5
    assert E.j == Fraction(-122023936, 161051)


@pytest.mark.parametrize("key,p,kind", [
    ("11a", 11, "split"), ("11a", 3, "good"), ("15a", 5, "split"), ("15a", 3, "nonsplit"),
    ("14a", 7, "split"), ("37a", 37, "nonsplit"),
])
def test_reduction_types(key, p, kind):
    assert curve(key).reduction(p) == kind


def test_additive_reduction():
    E = EllipticCurveData.from_ainvs((0, 0, 0, 0, 1), N=36)
    assert E.reduction(3) == "additive"
    with pytest.raises(ReductionTypeError):
        l_invariant(E, 3, 5)


def test_tate_parameter_valuation_and_residual():
    E = curve("11a")
    q = tate_parameter(E, 11, 10)
    assert q.v == 5
    assert tate_residual(E, 11, 10) >= 8


def test_tate_parameter_precision_is_honest():
    E = curve("11a")
    a, b = tate_parameter(E, 11, 8), tate_parameter(E, 11, 14)
    assert (a - b).is_zero()


def test_nonsplit_rejected():
    with pytest.raises(ReductionTypeError):
        l_invariant(curve("15a"), 3, 6)
    with pytest.raises(ReductionTypeError):
        mtt_check(curve("15a"), 3, 6)


def test_good_reduction_has_no_tate_parameter():
    with pytest.raises(ReductionTypeError):
        tate_parameter(curve("11a"), 3, 6)


def test_quadratic_twist_changes_splitting():
    E = curve("11a")
    # twisting by a non-square mod 11 swaps split and nonsplit at 11
    T = quadratic_twist(E, -1)
    assert T.j == E.j
    assert T.a_p(11) == -E.a_p(11)


def test_mtt_11a():
    res = mtt_check(curve("11a"), 11, 10)
    assert res.ord_q == 5
    assert res.l_alg == Fraction(1, 5)
    assert res.residual_digits >= 3
    assert res.value_at_center.is_zero()


def test_mtt_15a_at_5():
    res = mtt_check(curve("15a"), 5, 10)
    assert res.residual_digits >= 3
