from functools import lru_cache

import pytest

from padic_lfun.cli import CURVES
from padic_lfun.lfunc import eigen_lift, make_eigenform
from padic_lfun.linv import EllipticCurveData
from padic_lfun.modsym import rational_newforms
from padic_lfun.ocsym import (
    CriticalSlopeError,
    DivergenceError,
    OverconvergentSymbol,
    agreement_precision,
    eigen_precision,
    fil_distance,
    hecke_on_symbol,
    hecke_root,
    lift,
    presentation,
    relation_precision,
    specialization_matches,
    up_on_symbol,
)
from padic_lfun.padic import PadicNumber

M = 10


@lru_cache(maxsize=None)
def form_11a(p):
    E = EllipticCurveData.from_ainvs(CURVES["11a"])
    rec = E.record()
    if p == 11:
        rec[11] = 1
    return make_eigenform(11, 2, p, rec)


@lru_cache(maxsize=None)
def phi_11a(p, moments=M, choice=0):
    return eigen_lift(form_11a(p), moments, choice)


def test_hecke_root_solves_quadratic():
    a = hecke_root(-1, 3, 2, 20)
    assert (a * a + a + PadicNumber.from_int_abs(3, 3, 20)).is_zero()
    assert a.v == 0


def test_hecke_root_slope_one_weight_four():
    # x^2 - 3x + 27: slopes 1 and 2
    a = hecke_root(3, 3, 4, 20)
    assert a.v == 1
    assert (a * a - a * 3 + PadicNumber.from_int_abs(3, 27, 20)).is_zero()


@pytest.mark.parametrize("a_p,k", [(0, 2), (9, 4), (0, 4)])
def test_equal_slopes_rejected(a_p, k):
    with pytest.raises(CriticalSlopeError):
        hecke_root(a_p, 3, k, 10)


def test_presentation_covers_generators():
    pr = presentation(33)
    assert len(pr.expr) == 48  # |P^1(Z/33)| = 4 * 12
    assert 0 < len(pr.free) < len(pr.expr)


@pytest.mark.parametrize("p", [3, 5, 11])
def test_ordinary_lift_is_coherent(p):
    phi = phi_11a(p)
    assert phi.coherence == M
    assert relation_precision(phi) >= M and eigen_precision(phi) >= M
    assert specialization_matches(phi, form_11a(p).stab)


def test_lift_is_a_hecke_eigensymbol_away_from_p():
    phi = phi_11a(3)
    T2 = hecke_on_symbol(phi, 2)
    scaled = [[-2 * x for x in v] for v in phi.X]
    assert fil_distance(T2.X, scaled, 3, M, phi.shift) >= M


def test_up_eigenvalue():
    # eigen_precision measures U_p Φ against α Φ in the filtration
    phi = phi_11a(5)
    assert up_on_symbol(phi).M == M
    assert eigen_precision(phi) >= M


def test_independent_initialisations_agree():
    assert agreement_precision(phi_11a(3, M, 0), phi_11a(3, M, 1)) >= M


def test_rerun_at_higher_precision_truncates_to_lower():
    assert agreement_precision(phi_11a(3, M), phi_11a(3, M + 3)) >= M


def test_iteration_cap_raises():
    f = form_11a(3)
    with pytest.raises(DivergenceError):
        lift(f.stab, phi_11a(3).alpha, M, iters=1)


def test_dump_round_trip():
    phi = phi_11a(3)
    text = phi.dump()
    back = OverconvergentSymbol.parse_dump(text, phi.alpha)
    assert agreement_precision(phi, back) >= M
    assert back.dump() == text


def test_weight_four_ordinary_lift():
    forms = rational_newforms(5, 4)
    f = make_eigenform(5, 4, 3, forms[0])
    phi = eigen_lift(f, M)
    assert phi.coherence == M
    assert specialization_matches(phi, f.stab)
