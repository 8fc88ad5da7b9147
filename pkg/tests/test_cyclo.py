import random

import pytest

from padic_lfun.cyclo import (
    CycloElement,
    DirichletChar,
    dlog,
    enumerate_chars,
    gauss_sum,
    parse_char,
    primitive_root,
)
from padic_lfun.padic import PadicNumber

M = 10


def test_enumerate_examples():
    assert [c.is_trivial() for c in enumerate_chars(5, 0)] == [True]
    five = enumerate_chars(5, 1)
    assert sorted(c.order for c in five) == [1, 2, 4, 4]
    nine = enumerate_chars(3, 2)
    assert len(nine) == 6
    primitive = [c for c in nine if c.conductor_exponent == 2]
    assert len(primitive) == 4
    assert sorted(c.order for c in primitive) == [3, 3, 6, 6]


def test_p2_rejected():
    with pytest.raises(ValueError):
        enumerate_chars(2, 3)


@pytest.mark.parametrize("p,c", [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2)])
def test_counts(p, c):
    chars = enumerate_chars(p, c)
    assert len(chars) == (p - 1) * p ** (c - 1)
    assert len({c.label() for c in chars}) == len(chars)


@pytest.mark.parametrize("p,c", [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (5, 3), (7, 1), (7, 2), (7, 3)])
def test_gauss_identity_exhaustive(p, c):
    for chi in enumerate_chars(p, c):
        if chi.conductor_exponent != c:
            continue
        t = gauss_sum(chi, M) * gauss_sum(chi.conj(), M)
        expect = PadicNumber.from_int_abs(p, chi.parity * p**c, M + 10)
        assert t == CycloElement.scalar(expect, t.m)


def test_quadratic_gauss_square():
    chi = parse_char("chi{p=5,c=1,ord=2}")
    t = gauss_sum(chi, M)
    assert t * t == CycloElement.scalar(PadicNumber.from_int_abs(5, 5, 20), t.m)


def test_trivial_gauss_is_one():
    t = gauss_sum(enumerate_chars(7, 0)[0], M)
    assert t.m == 0 and t.coeffs[0].residue(M) == 1


@pytest.mark.parametrize("p,c", [(3, 3), (5, 2), (7, 2)])
def test_multiplicative(p, c):
    rng = random.Random(p * 100 + c)
    for chi in enumerate_chars(p, c):
        for _ in range(1000 // len(enumerate_chars(p, c))):
            a, b = rng.randrange(1, 10**6), rng.randrange(1, 10**6)
            va, vb, vab = chi.value(a, M), chi.value(b, M), chi.value(a * b, M)
            if a % p == 0 or b % p == 0:
                assert vab is None
                continue
            assert vab == va * vb


@pytest.mark.parametrize("p,c", [(3, 3), (5, 2), (7, 2)])
def test_conductor_minimal(p, c):
    for chi in enumerate_chars(p, c):
        f = chi.conductor_exponent
        units = [a for a in range(1, p**c) if a % p]
        # values factor through p^f
        for a in units:
            b = a + p**f if f else a + 1 if (a + 1) % p else a + 2
            if f and b % p:
                assert chi.value(a, M) == chi.value(b, M)
        # but not through p^(f-1)
        if f >= 1:
            step = p ** (f - 1)
            assert any(
                chi.value(a, M) != chi.value(a + step, M)
                for a in units if (a + step) % p
            )


@pytest.mark.parametrize("p", [3, 5, 7])
def test_parity(p):
    for chi in enumerate_chars(p, 3):
        v = chi.value(-1, M)
        assert v == CycloElement.scalar(PadicNumber.from_int_abs(p, chi.parity, M + 5), v.m)


def test_teichmuller_chars_stay_level0():
    for chi in enumerate_chars(7, 1):
        assert chi.value(3, M).m == 0


@pytest.mark.parametrize("p,c", [(3, 2), (5, 2)])
def test_gauss_embedding_compat(p, c):
    for chi in enumerate_chars(p, c):
        if chi.conductor_exponent != c:
            continue
        g = gauss_sum(chi, M)
        up = g.embed(g.m + 1)
        assert up.m == g.m + 1
        assert up.trace_to(g.m) == g * p


def test_galois_and_trace():
    p = 5
    z = CycloElement.zeta_power(p, 2, 1, M)
    assert z.galois(2) == CycloElement.zeta_power(p, 2, 2, M)
    tr = z.trace_to(0)
    assert tr.coeffs[0].is_zero()
    assert CycloElement.zeta_power(p, 1, 0, M).trace_to(0).coeffs[0].residue(M) == 4


def test_generator():
    assert primitive_root(3) == 2 and primitive_root(5) == 2 and primitive_root(7) == 3
    assert dlog(2, 5, 2) == 1


def test_parse_forms():
    chi = parse_char("chi{p=7,t=3}")
    assert chi == DirichletChar(7, 3) and chi.order == 2
    assert parse_char("trivial", 5).is_trivial()
    assert parse_char(chi.label()) == chi
    with pytest.raises(ValueError):
        parse_char("chi{p=5,c=1,ord=3}")
    with pytest.raises(ValueError):
        parse_char("psi(5)")
