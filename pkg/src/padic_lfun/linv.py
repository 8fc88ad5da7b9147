"""Tate parameters, L-invariants and the exceptional-zero derivative check for elliptic curves."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .modsym import curve_ap, curve_invariants, curve_record, semistable_conductor
from .padic import PadicNumber, log_unit, padic_from_rational, valuation


class ReductionTypeError(ValueError):
    """The curve does not have the reduction type the computation needs."""


@dataclass
class EllipticCurveData:
    ainvs: tuple[int, int, int, int, int]
    N: int

    @classmethod
    def from_ainvs(cls, ainvs, N: int | None = None) -> "EllipticCurveData":
        ainvs = tuple(int(a) for a in ainvs)
        if len(ainvs) != 5:
            raise ValueError("need five a-invariants")
        c4, c6, disc = curve_invariants(ainvs)
        if disc == 0:
            raise ValueError("singular curve")
        return cls(ainvs, N if N is not None else semistable_conductor(ainvs))

    @property
    def invariants(self) -> tuple[int, int, int]:
        return curve_invariants(self.ainvs)

    @property
    def discriminant(self) -> int:
        return self.invariants[2]

    @property
    def j(self) -> Fraction:
        c4, _, disc = self.invariants
        return Fraction(c4**3, disc)

    def a_p(self, p: int) -> int:
        return curve_ap(self.ainvs, p)

    def reduction(self, p: int) -> str:
        """``good``, ``split``, ``nonsplit`` or ``additive`` (assuming a minimal model)."""
        c4, _, disc = self.invariants
        if disc % p:
            return "good"
        if c4 % p == 0:
            return "additive"
        return "split" if self.a_p(p) == 1 else "nonsplit"

    def record(self, lmax: int = 13) -> dict[int, int]:
        return curve_record(self.ainvs, self.N, lmax)


def quadratic_twist(E: EllipticCurveData, d: int) -> EllipticCurveData:
    """The twist ``y^2 = x^3 - 27 c4 d^2 x - 54 c6 d^3`` (not minimised)."""
    c4, c6, _ = E.invariants
    ainvs = (0, 0, 0, -27 * c4 * d * d, -54 * c6 * d**3)
    return EllipticCurveData(ainvs, E.N)


# the j-series ----------------------------------------------------------------

@lru_cache(maxsize=None)
def j_coefficients(n: int) -> tuple[int, ...]:
    """``c(-1), c(0), ..., c(n-2)`` with ``j = Σ c(m) q^m`` (``c(-1) = 1``)."""
    L = n + 1
    e4 = [1] + [240 * sum(d**3 for d in range(1, m + 1) if m % d == 0) for m in range(1, L)]
    e4cube = _mul(_mul(e4, e4, L), e4, L)
    # Δ / q = Π (1 - q^m)^24
    prod = [1] + [0] * (L - 1)
    for m in range(1, L):
        for _ in range(24):
            prod = [prod[i] - (prod[i - m] if i >= m else 0) for i in range(L)]
    inv = _inverse(prod, L)
    out = _mul(e4cube, inv, L)
    return tuple(out[:n])


def _mul(a, b, L):
    out = [0] * L
    for i, x in enumerate(a[:L]):
        if x:
            for j, y in enumerate(b[: L - i]):
                out[i + j] += x * y
    return out


def _inverse(a, L):
    out = [0] * L
    out[0] = 1  # a[0] == 1
    for n in range(1, L):
        out[n] = -sum(a[i] * out[n - i] for i in range(1, n + 1))
    return out


def j_of_q(q: PadicNumber, terms: int) -> PadicNumber:
    c = j_coefficients(terms + 1)
    acc = q.inverse()
    qm = PadicNumber(q.p, 0, 1, q.absprec + 10)
    for m in range(0, terms):
        acc = acc + qm * c[m + 1]
        qm = qm * q
    return acc


def tate_parameter(E: EllipticCurveData, p: int, M: int) -> PadicNumber:
    """``q`` with ``j(q) = j(E)``, by iterating ``q ← 1/(j - 744 - 196884 q - ...)``."""
    j = E.j
    vj = valuation(j.numerator, p) - valuation(j.denominator, p)
    if vj >= 0:
        raise ReductionTypeError(f"v_{p}(j) = {vj} ≥ 0: no Tate parameter")
    vq = -vj
    W = M + 2 * vq + 4
    jp = padic_from_rational(j.numerator, j.denominator, p, W)
    terms = (W + vq) // vq + 2
    c = j_coefficients(terms + 1)
    q = jp.inverse()
    for _ in range(W + 2):
        tail = PadicNumber.zero(p, W + vq)
        qm = PadicNumber(p, 0, 1, W + vq)
        for m in range(terms):
            tail = tail + qm * c[m + 1]
            qm = qm * q
        q_new = (jp - tail).inverse()
        if q_new.identical(q):
            break
        q = q_new
    return PadicNumber(p, q.v, q.u % p**M, M)


def l_invariant(E: EllipticCurveData, p: int, M: int) -> PadicNumber:
    """``log_p(q)/ord_p(q)`` with the Iwasawa logarithm (``log_p(p) = 0``)."""
    red = E.reduction(p)
    if red != "split":
        raise ReductionTypeError(f"reduction at {p} is {red}, not split multiplicative")
    q = tate_parameter(E, p, M)
    return log_unit(q) / q.v


@dataclass
class MTTResult:
    derivative: PadicNumber
    l_invariant: PadicNumber
    l_alg: Fraction
    ord_q: int
    residual_digits: int
    precision: int
    value_at_center: PadicNumber


def mtt_check(E: EllipticCurveData, p: int, M: int) -> MTTResult:
    """Compare ``L_p'(1)`` with ``𝓛 · L_alg`` for a split multiplicative prime ``p``."""
    from .lfunc import make_eigenform, trivial_zero_report

    red = E.reduction(p)
    if red == "nonsplit":
        raise ReductionTypeError(f"{p} is nonsplit multiplicative: no exceptional zero")
    if red != "split":
        raise ReductionTypeError(f"{p} is {red}: no exceptional zero")
    rec = E.record()
    rec[p] = 1
    form = make_eigenform(E.N, 2, p, rec, label=",".join(map(str, E.ainvs)))
    rep = trivial_zero_report(form, M)
    if not rep.l_alg:
        raise ReductionTypeError("L(E,1) = 0: the comparison is 0 = 0")
    q = tate_parameter(E, p, M + 4)
    L = log_unit(q) / q.v
    d = rep.derivative.coeffs[0]
    pred = L * padic_from_rational(rep.l_alg.numerator, rep.l_alg.denominator, p, M + 8)
    diff = d - pred
    ref = pred.v if not pred.is_zero() else 0
    digits = (diff.absprec if diff.is_zero() else diff.v) - ref
    return MTTResult(d, L, rep.l_alg, q.v, digits, min(d.absprec, L.absprec) - ref, rep.value.coeffs[0])


def tate_residual(E: EllipticCurveData, p: int, M: int) -> int:
    """Digits of ``j(q) - j`` relative to ``j``: at least ``M - 2`` when the fixed point is accurate."""
    q = tate_parameter(E, p, M)
    j = E.j
    jp = padic_from_rational(j.numerator, j.denominator, p, M + 10)
    terms = (M + 2 * q.v) // q.v + 3
    d = j_of_q(q, terms) - jp
    return (d.absprec if d.is_zero() else d.v) - jp.v


