"""The measure attached to an overconvergent eigensymbol and its Mellin transform.

The measure of ``a + p^n Z_p`` is ``α^{-n} Φ({∞} - {-a/p^n})`` pushed
forward along ``z ↦ p^n z + a``.  Its moments are stored recentred at the
Teichmüller lift ``ω(a)``, so that ``<x>^{e} = (1 + (x - ω(a))/ω(a))^{e}``
expands with integral binomial coefficients.

``L_p(χ, s) = Σ_a χ(a) ∫_{a+p^n} <x>^{s-1+g/2} dμ``: the central point is
``s = 1`` and the integer ``r`` corresponds to the moment ``j = r - 1 + g/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .cyclo import CycloElement, DirichletChar, trivial_char
from .modsym import (
    INF,
    ClassicalSymbol,
    StabilizedSymbol,
    build_space,
    classical_special_value,
    eigen_symbol,
    hecke_eigenvalue,
    p_stabilize,
    root_number,
)
from .ocsym import OverconvergentSymbol, alpha_for, lift
from .padic import PadicNumber, PadicPowerSeries, PrecisionError, padic_from_rational, teichmuller_int, valuation


class PairingError(ValueError):
    """Character parity does not match the sign of the symbol."""


@dataclass
class Eigenform:
    """A rational newform with its symbols and chosen p-stabilisation."""

    label: str
    N: int
    k: int
    p: int
    record: dict[int, int]
    plus: ClassicalSymbol
    minus: ClassicalSymbol
    symbol: ClassicalSymbol
    stab: StabilizedSymbol
    a_p: Fraction
    epsilon: int

    @property
    def g(self) -> int:
        return self.k - 2

    @property
    def steinberg(self) -> bool:
        return self.N % self.p == 0

    @property
    def tame_level(self) -> int:
        n = self.N
        while n % self.p == 0:
            n //= self.p
        return n


def make_eigenform(N: int, k: int, p: int, record: dict[int, int], label: str | None = None) -> Eigenform:
    space = build_space(N, k)
    plus = eigen_symbol(space, record, 1)
    minus = eigen_symbol(space, record, -1)
    full = plus + minus
    a_p = Fraction(record[p]) if p in record else hecke_eigenvalue(plus, p)
    if N % (p * p) == 0:
        raise ValueError("p^2 divides the level")
    stab = p_stabilize(full, p, a_p)
    return Eigenform(label or f"{N}.{k}", N, k, p, dict(record), plus, minus, full, stab, a_p, root_number(plus))


def eigen_lift(form: Eigenform, M: int, choice: int = 0) -> OverconvergentSymbol:
    alpha = alpha_for(form.stab, M + 2 * form.k + 8)
    return lift(form.stab, alpha, M, choice=choice)


def epsilon_tilde(form: Eigenform) -> int:
    """Sign of the p-adic functional equation: the global sign with the local sign at a Steinberg ``p`` removed."""
    eps = form.epsilon
    if form.steinberg:
        eps_p = -int(form.a_p / Fraction(form.p) ** (form.g // 2))
        eps *= eps_p
    return eps


def exceptional(form: Eigenform) -> bool:
    """``p`` is exceptional when ``p || N`` and ``a_p = p^{g/2}``."""
    return form.steinberg and form.a_p == Fraction(form.p) ** (form.g // 2)


# the measure ---------------------------------------------------------------

@dataclass
class GaloisDistribution:
    """Recentred moments ``ν_m(a) = ∫_{a+p^n}(x - ω(a))^m dμ`` for ``n ≤ n_max``."""

    p: int
    k: int
    M: int
    n_max: int
    alpha: PadicNumber
    shift: int
    pieces: dict[tuple[int, int], list[PadicNumber]] = field(default_factory=dict)

    @property
    def slope(self) -> int:
        return self.alpha.v

    def bound(self, n: int) -> int:
        """Absolute precision ceiling for integrals over level-``n`` pieces."""
        return self.M - self.shift - n * self.slope

    def residues(self, n: int) -> list[int]:
        return [a for a in range(1, self.p**n) if a % self.p]


def ev_from_symbol(phi: OverconvergentSymbol, n_max: int) -> GaloisDistribution:
    p, M, S = phi.p, phi.M, phi.shift
    h = phi.alpha.v
    if M - S - n_max * h <= 0:
        raise PrecisionError(f"depth {n_max} needs more than {M} moments at slope {h}")
    ev = GaloisDistribution(p, phi.k, M, n_max, phi.alpha, S)
    W = M + S
    mod = p**W
    for n in range(1, n_max + 1):
        ainv = phi.alpha.inverse() ** n
        pn = p**n
        for a in ev.residues(n):
            D = phi.evaluate(INF, (-a, pn))
            b = (a - teichmuller_int(a, p, W)) % mod
            out = []
            for m in range(M):
                acc = 0
                for i in range(m + 1):
                    if D.X[i]:
                        acc += comb(m, i) * pow(pn, i, mod) * pow(b, m - i, mod) * D.X[i]
                nu = PadicNumber.from_scaled(p, acc % mod, S, M)
                out.append(nu * ainv)
            ev.pieces[(n, a)] = out
    return ev


def level_compatibility(ev: GaloisDistribution) -> int:
    """Smallest agreement (absolute valuation) between a piece and the sum of its children."""
    p = ev.p
    best = ev.bound(1)
    for n in range(1, ev.n_max):
        for a in ev.residues(n):
            kids = [ev.pieces[(n + 1, a + b * p**n)] for b in range(p)]
            for m, parent in enumerate(ev.pieces[(n, a)]):
                tot = kids[0][m]
                for kd in kids[1:]:
                    tot = tot + kd[m]
                d = tot - parent
                if not d.is_zero():
                    best = min(best, d.v)
                best = min(best, d.absprec)
    return best


def _exponent_int(s, g: int, p: int, K: int) -> tuple[int, int]:
    """Integer representative of ``s - 1 + g/2`` and the precision to which it is known."""
    if isinstance(s, PadicNumber):
        if s.v < 0 and not s.is_zero():
            raise ValueError("s must be a p-adic integer")
        prec = min(K, s.absprec)
        return (s.residue(prec) - 1 + g // 2) % p**prec, prec
    f = Fraction(s)
    if f.denominator % p == 0:
        raise ValueError("s must be a p-adic integer")
    x = padic_from_rational(f.numerator, f.denominator, p, K)
    return (x.residue(K) - 1 + g // 2) % p**K, K


def _binom_mod(e: int, m: int, p: int, K: int) -> int:
    """``C(e, m)`` modulo ``p^K`` for ``e`` known modulo ``p^{K + v(m!)}``."""
    return comb(e, m) % p**K


def _char_value(chi: DirichletChar, a: int, prec: int) -> CycloElement:
    if chi.conductor == 1:
        return CycloElement.scalar(PadicNumber(chi.p, 0, 1, prec))
    return chi.value(a, prec)


def _level(chi: DirichletChar) -> int:
    return max(chi.conductor_exponent, 1)


def lp_value(ev: GaloisDistribution, chi: DirichletChar, s) -> CycloElement:
    """``L_p(χ, s)`` as an element of ``Q_p(μ_{p^m})``."""
    p = ev.p
    n = _level(chi)
    if n > ev.n_max:
        raise PrecisionError(f"character needs depth {n}, have {ev.n_max}")
    bound = ev.bound(n)
    vmax = valuation(factorial(ev.M), p)
    e, eprec = _exponent_int(s, ev.k - 2, p, bound + vmax + 2)
    K = bound + 4
    mod = p**K
    binoms = [_binom_mod(e, m, p, K) for m in range(ev.M)]
    total = CycloElement.scalar(PadicNumber.zero(p, K), chi.level)
    for a in ev.residues(n):
        winv = pow(teichmuller_int(a, p, K), -1, mod)
        acc = None
        for m, nu in enumerate(ev.pieces[(n, a)]):
            c = binoms[m] * pow(winv, m, mod) % mod
            if c:
                t = nu * PadicNumber.from_int_abs(p, c, K)
                acc = t if acc is None else acc + t
        if acc is None:
            continue
        total = total + _char_value(chi, a, K) * acc
    return total.add_bigoh(min(bound, eprec - vmax))


def _kappa(e0: int, D: int, M: int) -> list[list[Fraction]]:
    """Coefficients of ``t^m`` in ``(1+t)^{e0} log(1+t)^d / d!`` for ``d ≤ D``, ``m < M``."""
    lg = [Fraction(0)] + [Fraction((-1) ** (i + 1), i) for i in range(1, M)]
    base = [Fraction(_gbinom(e0, m)) for m in range(M)]
    out = []
    cur = base
    for d in range(D + 1):
        if d:
            nxt = [Fraction(0)] * M
            for i, x in enumerate(cur):
                if x:
                    for j in range(1, M - i):
                        nxt[i + j] += x * lg[j]
            cur = [x / d for x in nxt]
        out.append(cur)
    return out


def _gbinom(e: int, m: int) -> int:
    if e >= 0:
        return comb(e, m)
    return (-1) ** m * comb(m - e - 1, m)


def lp_series(ev: GaloisDistribution, chi: DirichletChar, r: int, D: int) -> PadicPowerSeries:
    """Expansion of ``L_p(χ, s)`` in powers of ``(s - r)`` up to degree ``D``."""
    p = ev.p
    n = _level(chi)
    if n > ev.n_max:
        raise PrecisionError(f"character needs depth {n}, have {ev.n_max}")
    e0 = r - 1 + (ev.k - 2) // 2
    kap = _kappa(e0, D, ev.M)
    bound = ev.bound(n)
    K = bound + 4
    coeffs = []
    for d in range(D + 1):
        # the dropped tail m ≥ M has valuation ≥ bound - v(denominators of κ)
        loss = max([0] + [-_vfrac(kap[d][m], p) for m in range(ev.M) if kap[d][m]])
        total = CycloElement.scalar(PadicNumber.zero(p, K), chi.level)
        for a in ev.residues(n):
            winv = pow(teichmuller_int(a, p, K + 4), -1, p ** (K + 4))
            acc = None
            for m, nu in enumerate(ev.pieces[(n, a)]):
                c = kap[d][m]
                if not c:
                    continue
                cp = padic_from_rational(c.numerator, c.denominator, p, K + 4) * PadicNumber.from_int_abs(
                    p, pow(winv, m, p ** (K + 4)), K + 4)
                t = nu * cp
                acc = t if acc is None else acc + t
            if acc is not None:
                total = total + _char_value(chi, a, K) * acc
        coeffs.append(total.add_bigoh(bound - loss))
    return PadicPowerSeries(p, r, coeffs)


def _vfrac(x: Fraction, p: int) -> int:
    return valuation(x.numerator, p) - valuation(x.denominator, p)


# classical side ------------------------------------------------------------

def _teich_char(p: int, j: int) -> DirichletChar:
    return DirichletChar(p, (-j) % (p - 1))


def interpolation_rhs(form: Eigenform, chi: DirichletChar, r: int, alpha: PadicNumber, prec: int) -> CycloElement:
    """The value ``L_p(χ, r)`` predicted from the classical symbol and the Euler-type factors.

    With ``j = r - 1 + g/2`` and ``ψ = χ ω^{-j}`` of conductor ``p^c``:
    ``(1 - p^j/α)(1 - p^{g-j}/α) φ(D*)(z^j)`` when ``ψ`` is trivial (only the
    first factor for a Steinberg ``p``), and ``α^{-c} Σ_a ψ(a) φ({∞}-{-a/p^c})((p^c z + a)^j)``
    otherwise.
    """
    p, g = form.p, form.g
    j = r - 1 + g // 2
    if not 0 <= j <= g:
        raise ValueError(f"r = {r} is not critical")
    psi = chi * _teich_char(p, j)
    sym = form.symbol
    if psi.conductor == 1:
        base = sym.evaluate(INF, (0, 1))[j]
        val = padic_from_rational(base.numerator, base.denominator, p, prec)
        one = PadicNumber(p, 0, 1, prec)
        f1 = one - PadicNumber.from_int_abs(p, p**j, prec) / alpha
        val = val * f1
        if not form.steinberg:
            val = val * (one - PadicNumber.from_int_abs(p, p ** (g - j), prec) / alpha)
        return CycloElement.scalar(val, chi.level)
    c = psi.conductor_exponent
    tw = classical_special_value(sym, psi, j, prec)
    return tw * (alpha.inverse() ** c)


def lp_value_inverted(ev: GaloisDistribution, chi: DirichletChar, s) -> CycloElement:
    """The Mellin transform of the pushforward of the measure along ``x ↦ x^{-1}``."""
    p = ev.p
    if isinstance(s, PadicNumber):
        s2 = PadicNumber.from_int_abs(p, 2, s.absprec) - s
    else:
        s2 = 2 - Fraction(s)
    return lp_value(ev, chi.conj(), s2)


def _ratio_digits(a: CycloElement, b: CycloElement) -> int:
    """Significant digits of agreement: ``v(a - b) - v(b)`` (large when equal)."""
    d = a - b
    if d.is_zero():
        return d.precision - (b.valuation() if not b.is_zero() else 0)
    return d.valuation() - b.valuation()


@dataclass
class InterpolationResult:
    values: list[tuple[str, int, CycloElement, CycloElement]]
    cross_digits: int
    direct_digits: int


def interpolation_check(form: Eigenform, pairs: list[tuple[DirichletChar, int]], M: int,
                        rhs_alpha: PadicNumber | None = None, phi: OverconvergentSymbol | None = None,
                        sign: int = 0) -> InterpolationResult:
    """Compare ``L_p(χ_i, r_i)`` with the classical prediction, pairwise as cross-ratios.

    ``sign`` restricts to characters whose parity ``χ(-1)(-1)^j`` equals it
    (0 accepts both, since the combined symbol carries both signs).
    """
    g = form.g
    for chi, r in pairs:
        par = chi.parity * (-1) ** (r - 1 + g // 2)
        if sign and par != sign:
            raise PairingError(f"{chi.label()} at r={r} has parity {par}")
    phi = phi or eigen_lift(form, M)
    n_max = max(_level(chi) for chi, _ in pairs)
    ev = ev_from_symbol(phi, n_max)
    alpha = rhs_alpha or phi.alpha
    vals = []
    for chi, r in pairs:
        L = lp_value(ev, chi, r)
        R = interpolation_rhs(form, chi, r, alpha, M + 8)
        vals.append((chi.label(), r, L, R))
    cross = 10**6
    direct = 10**6
    for i, (_, _, Li, Ri) in enumerate(vals):
        direct = min(direct, _ratio_digits(Li, Ri))
        for _, _, Lj, Rj in vals[i + 1:]:
            cross = min(cross, _ratio_digits(Li * Rj, Lj * Ri))
    if len(vals) == 1:
        cross = vals[0][2].precision
    return InterpolationResult(vals, cross, direct)


# functional equation -----------------------------------------------------

def angle_power(n: int, s, p: int, prec: int) -> PadicNumber:
    """``<n>^{s-1}`` for a unit ``n`` and a p-adic integer ``s``."""
    w = teichmuller_int(n, p, prec + 4)
    ang = n * pow(w, -1, p ** (prec + 4)) % p ** (prec + 4)
    y = (ang - 1) % p ** (prec + 4)
    e, eprec = _exponent_int(s, 0, p, prec + 8)
    acc = 0
    mod = p ** (prec + 4)
    m = 0
    while m * valuation(y, p) < prec + 4 if y else m == 0:
        acc += comb(e, m) * pow(y, m, mod)
        m += 1
    return PadicNumber.from_int_abs(p, acc % mod, min(prec, eprec))


@dataclass
class FEResult:
    eps_fit: int
    eps_expected: int
    min_digits: int
    table: list[tuple[str, str, int, int]]  # (char, s, digits(+), digits(-))


def _s_repr(s) -> str:
    return str(s)


def functional_equation_check(form: Eigenform, chars: list[DirichletChar], grid: list, M: int,
                              phi: OverconvergentSymbol | None = None) -> FEResult:
    """Test ``L_p(χ, s) = ε̃ χ^{-1}(-n) <n>^{1-s} L_p(χ^{-1}, 2 - s)`` with ``n`` the tame level.

    With the variable inverted, ``L'(χ, s) = L_p(χ^{-1}, 2 - s)``, this is
    ``L'(χ, s) = ε̃ χ(-n) <n>^{s-1} L'(χ^{-1}, 2 - s)``.
    """
    p = form.p
    n = form.tame_level
    phi = phi or eigen_lift(form, M)
    n_max = max(_level(c) for c in chars)
    ev = ev_from_symbol(phi, n_max)
    table = []
    votes = {1: 10**6, -1: 10**6}
    for chi in chars:
        for s in grid:
            L = lp_value(ev, chi, s)
            if isinstance(s, PadicNumber):
                s2 = PadicNumber.from_int_abs(p, 2, s.absprec) - s
            else:
                s2 = 2 - Fraction(s)
            Lc = lp_value(ev, chi.conj(), s2)
            factor = _char_value(chi.conj(), (-n) % p ** (chi.conductor_exponent + M), M + 8) * angle_power(n, s2, p, M + 8)
            rhs = factor * Lc
            dp = _ratio_digits(L, rhs)
            dm = _ratio_digits(L, -rhs) if not rhs.is_zero() else dp
            table.append((chi.label(), _s_repr(s), dp, dm))
            votes[1] = min(votes[1], dp)
            votes[-1] = min(votes[-1], dm)
    fit = 1 if votes[1] >= votes[-1] else -1
    return FEResult(fit, epsilon_tilde(form), votes[fit], table)


# trivial zeros --------------------------------------------------------------

@dataclass
class LpReport:
    form: str
    char: str
    center: int
    series: PadicPowerSeries
    precision: int
    exceptional_set: list[int]
    e: int
    value: CycloElement
    derivative: CycloElement | None
    l_alg: Fraction
    empirical_linv: PadicNumber | None
    extra: dict = field(default_factory=dict)

    def to_text(self) -> str:
        from .report import format_cyclo

        lines = [
            f"form: {self.form}",
            f"char: {self.char}",
            f"center: {self.center}",
            f"exceptional_set: {','.join(map(str, self.exceptional_set)) or '-'}",
            f"e: {self.e}",
            f"precision: {self.precision}",
            f"value: {format_cyclo(self.value)}",
            f"derivative: {format_cyclo(self.derivative) if self.derivative is not None else '-'}",
            f"l_alg: {self.l_alg}",
            f"empirical_L_invariant: {self.empirical_linv if self.empirical_linv is not None else '-'}",
        ]
        for k, v in self.extra.items():
            lines.append(f"{k}: {v}")
        return "\n".join(lines) + "\n"


def central_algebraic_value(form: Eigenform) -> Fraction:
    return form.symbol.evaluate(INF, (0, 1))[form.g // 2]


def trivial_zero_report(form: Eigenform, M: int, phi: OverconvergentSymbol | None = None) -> LpReport:
    p = form.p
    phi = phi or eigen_lift(form, M)
    ev = ev_from_symbol(phi, 1)
    chi = trivial_char(p)
    ser = lp_series(ev, chi, 1, 1)
    E = [p] if exceptional(form) else []
    l_alg = central_algebraic_value(form)
    val, der = ser.coeffs[0], ser.coeffs[1]
    emp = None
    if E and l_alg:
        d = der.coeffs[0]
        emp = d / padic_from_rational(l_alg.numerator, l_alg.denominator, p, M + 8)
    prec = min(c.precision for c in ser.coeffs)
    extra = {}
    if not E:
        one = PadicNumber(p, 0, 1, M + 8)
        a_inv = phi.alpha.inverse()
        g = form.g
        fac = one - PadicNumber.from_int_abs(p, p ** (g // 2), M + 8) * a_inv
        if not form.steinberg:
            fac = fac * fac
        extra["euler_factor"] = fac
    return LpReport(form.label, chi.label(), 1, ser, prec, E, len(E), val, der, l_alg, emp, extra)
