import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padic_lfun.dist import (
    ApproxDistribution,
    SemigroupError,
    act,
    act_unit_scaling,
    in_semigroup,
    poly_dual_action,
    specialize,
)
from padic_lfun.modsym import mat_mul
from padic_lfun.padic import PadicNumber, PrecisionError

P, K, M = 3, 4, 8


def _dist(seed: int) -> ApproxDistribution:
    return ApproxDistribution(P, K, M, [(seed * 7 + 13 * j * j + 1) for j in range(M)])


def semigroup():
    unit = st.tuples(st.integers(-7, 7), st.sampled_from([1, 2])).map(lambda t: 3 * t[0] + t[1])
    small = st.integers(-20, 20)
    mats = st.tuples(small, small, small.map(lambda c: c * P), unit)
    return mats.filter(lambda m: m[0] * m[3] - m[1] * m[2] != 0)


@settings(max_examples=40, deadline=None)
@given(semigroup(), semigroup(), st.integers(0, 50))
def test_left_action(A, B, seed):
    mu = _dist(seed)
    assert act(A, act(B, mu)) == act(mat_mul(A, B), mu)


@settings(max_examples=40, deadline=None)
@given(semigroup(), st.integers(0, 50))
def test_specialisation_is_equivariant(A, seed):
    mu = _dist(seed)
    lhs = specialize(act(A, mu))
    rhs = poly_dual_action(A, specialize(mu), K - 2)
    assert all((x - y).is_zero() for x, y in zip(lhs, rhs))


def test_identity_and_semigroup_membership():
    mu = _dist(1)
    assert act((1, 0, 0, 1), mu) == mu
    assert in_semigroup((3, 1, 0, 1), 3)
    assert not in_semigroup((1, 0, 0, 3), 3)
    with pytest.raises(SemigroupError):
        act((1, 0, 0, 3), mu)


def test_dirac_moments():
    d = ApproxDistribution.dirac(P, K, M, 2)
    assert [m.residue(M - j) for j, m in enumerate(d.moments())] == [2**j % 3 ** (M - j) for j in range(M)]


def test_translation_moves_dirac():
    d = ApproxDistribution.dirac(P, K, M, 2)
    # (γμ)(z^j) with γ = [1, 1; 0, 1] integrates (z + 1)^j
    moved = act((1, 1, 0, 1), d)
    assert moved == ApproxDistribution.dirac(P, K, M, 3)


def test_unit_scaling_matches_matrix_action():
    mu = _dist(4)
    assert act_unit_scaling(2, mu) == act((2, 0, 0, 1), mu)


def test_filtration_precision():
    mu = _dist(2)
    assert [m.absprec for m in mu.moments()] == [M - j for j in range(M)]
    with pytest.raises(PrecisionError):
        mu.truncate(M + 1)


def test_shift_bookkeeping():
    mu = ApproxDistribution.from_moments(P, K, [PadicNumber(P, -1, 1, M + 2)] + [0] * (M - 1))
    assert mu.shift == 1
    assert mu.moment(0).v == -1
    assert mu.with_shift(3) == mu
