import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padic_lfun.padic import (
    PadicDomainError,
    PadicNumber,
    iwasawa_log,
    log_unit,
    padic_from_rational,
    padic_power_series,
    teichmuller,
)

PRIMES = [3, 5, 7, 11]


def test_from_rational_examples():
    z = padic_from_rational(0, 1, 5, 8)
    assert z.is_zero() and z.absprec == 8
    one = padic_from_rational(1, 1, 5, 8)
    assert (one.v, one.u, one.M) == (0, 1, 8)
    fifth = padic_from_rational(1, 5, 5, 8)
    assert (fifth.v, fifth.u) == (-1, 1)


def test_from_rational_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        padic_from_rational(1, 0, 5, 8)


def test_teichmuller_examples():
    assert teichmuller(1, 5, 8).residue(8) == 1
    assert teichmuller(2, 5, 2).residue(2) == 7
    t2 = teichmuller(2, 5, 8)
    assert teichmuller(4, 5, 8) == t2 * t2


def test_teichmuller_domain():
    with pytest.raises(PadicDomainError):
        teichmuller(10, 5, 4)


@pytest.mark.parametrize("p", PRIMES)
def test_teichmuller_properties(p):
    rng = random.Random(p)
    for _ in range(100):
        a = rng.randrange(1, 10**6)
        if a % p == 0:
            continue
        w = teichmuller(a, p, 12)
        assert (w ** (p - 1)).residue(12) == 1
        assert w.residue(1) == a % p


def test_teichmuller_p2_mod4():
    assert teichmuller(3, 2, 6).residue(6) == 63
    assert teichmuller(5, 2, 6).residue(6) == 1


def test_log_examples():
    p = 5
    assert iwasawa_log(padic_from_rational(1, 1, p, 10)).is_zero()
    x = padic_from_rational(1 + p, 1, p, 10)
    assert iwasawa_log(x * x) == iwasawa_log(x) * 2
    direct = sum(Fraction((-1) ** (n + 1) * p**n, n) for n in range(1, 30))
    ref = padic_from_rational(direct.numerator, direct.denominator, p, 6)
    assert iwasawa_log(padic_from_rational(6, 1, p, 12)).add_bigoh(6) == ref


def test_log_domain():
    with pytest.raises(PadicDomainError):
        iwasawa_log(padic_from_rational(2, 1, 5, 8))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(0, 10**6), st.integers(0, 10**6))
def test_log_additive(p, a, b):
    x = padic_from_rational(1 + p * a, 1, p, 14)
    y = padic_from_rational(1 + p * b, 1, p, 14)
    assert iwasawa_log(x * y) == iwasawa_log(x) + iwasawa_log(y)


def test_log_unit_kills_roots_of_unity():
    p = 7
    w = teichmuller(3, p, 10)
    x = padic_from_rational(1 + 7 * 5, 1, p, 10)
    assert log_unit(w * x) == iwasawa_log(x)


def test_power_series_examples():
    p = 5
    one = padic_from_rational(1, 1, p, 10)
    s = padic_power_series(one, 1, 4, 10)
    assert s.coeffs[0] == one and all(c.is_zero() for c in s.coeffs[1:])
    x = padic_from_rational(1 + p, 1, p, 10)
    s = padic_power_series(x, 1, 4, 10)
    assert s.coeffs[1] == iwasawa_log(x)
    assert s(1) == s.coeffs[0]


@pytest.mark.parametrize("p", [3, 5, 7])
def test_power_series_matches_integer_powers(p):
    rng = random.Random(10 + p)
    M = 12
    for _ in range(20):
        a = rng.randrange(1, 500)
        if a % p == 0:
            a += 1
        x = padic_from_rational(a, 1, p, M)
        r = rng.randrange(-3, 4)
        ser = padic_power_series(x, r, 30, M)
        s = r + rng.randrange(-4, 5)
        ang = x / teichmuller(a, p, M)
        direct = ang ** (s - 1)
        got = ser(s)
        prec = min(got.absprec, 8)
        assert got.add_bigoh(prec) == direct.add_bigoh(prec)


def test_arithmetic_and_precision():
    p = 7
    a = padic_from_rational(3, 7, p, 10)
    b = padic_from_rational(-3, 7, p, 10)
    c = a + b
    assert c.is_zero()
    d = padic_from_rational(22, 7, p, 10) - padic_from_rational(1, 7, p, 10)
    assert d.to_fraction() == 3 and d.absprec == 9
    q = padic_from_rational(2, 1, p, 10) / padic_from_rational(49, 1, p, 10)
    assert q.v == -2


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(-10**8, 10**8), st.integers(1, 10**5),
       st.integers(-10**8, 10**8), st.integers(1, 10**5))
def test_precision_soundness(p, a, b, c, d):
    M = 8
    def ops(prec):
        x = padic_from_rational(a, b, p, prec)
        y = padic_from_rational(c, d, p, prec)
        out = [x + y, x - y, x * y]
        if not y.is_zero():
            out.append(x / y)
        return out
    lo, hi = ops(M), ops(M + 4)
    for r_lo, r_hi in zip(lo, hi):
        assert r_hi.add_bigoh(r_lo.absprec).identical(r_lo)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5, 11]), st.integers(-10**9, 10**9), st.integers(1, 10**6), st.integers(1, 12))
def test_string_roundtrip(p, a, b, M):
    x = padic_from_rational(a, b, p, M)
    assert PadicNumber.parse(str(x)).identical(x)


def test_string_format():
    x = padic_from_rational(1, 5, 5, 3)
    assert str(x) == "5^-1 * [1, 0, 0] + O(5^(2))"
