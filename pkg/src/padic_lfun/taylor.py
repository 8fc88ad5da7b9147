"""Truncated power series in ``x_1..x_e, u`` and the Taylor-coefficient vanishing argument.

A series ``𝕃(x, u) = Σ a_i(n) x^n u^i`` is stored sparsely, keyed by
``(n_1, ..., n_e, i)``, truncated at total degree ``|n| + i ≤ D``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial

Key = tuple[int, ...]


class ResizeError(ValueError):
    """Truncation degree too small for the requested construction."""


class MultiSeries:
    def __init__(self, e: int, D: int, coeffs: dict[Key, Fraction] | None = None):
        self.e, self.D = e, D
        self.coeffs: dict[Key, Fraction] = {}
        for k, v in (coeffs or {}).items():
            if len(k) != e + 1:
                raise ValueError("exponent key has the wrong length")
            if sum(k) <= D and v:
                self.coeffs[k] = Fraction(v)

    @classmethod
    def monomial(cls, e: int, D: int, n: tuple[int, ...], i: int, c=1) -> "MultiSeries":
        return cls(e, D, {tuple(n) + (i,): Fraction(c)})

    @classmethod
    def u(cls, e: int, D: int) -> "MultiSeries":
        return cls.monomial(e, D, (0,) * e, 1)

    @classmethod
    def x(cls, e: int, D: int, v: int) -> "MultiSeries":
        n = [0] * e
        n[v] = 1
        return cls.monomial(e, D, tuple(n), 0)

    @classmethod
    def one(cls, e: int, D: int) -> "MultiSeries":
        return cls.monomial(e, D, (0,) * e, 0)

    def a(self, i: int, n: tuple[int, ...]) -> Fraction:
        return self.coeffs.get(tuple(n) + (i,), Fraction(0))

    def copy(self) -> "MultiSeries":
        return MultiSeries(self.e, self.D, dict(self.coeffs))

    def _same(self, other: "MultiSeries") -> int:
        if self.e != other.e:
            raise ValueError("different numbers of variables")
        return min(self.D, other.D)

    def __add__(self, other: "MultiSeries") -> "MultiSeries":
        D = self._same(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return MultiSeries(self.e, D, out)

    def __neg__(self) -> "MultiSeries":
        return MultiSeries(self.e, self.D, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "MultiSeries") -> "MultiSeries":
        return self + (-other)

    def __mul__(self, other) -> "MultiSeries":
        if not isinstance(other, MultiSeries):
            c = Fraction(other)
            return MultiSeries(self.e, self.D, {k: v * c for k, v in self.coeffs.items()})
        D = self._same(other)
        out: dict[Key, Fraction] = {}
        for k1, v1 in self.coeffs.items():
            d1 = sum(k1)
            for k2, v2 in other.coeffs.items():
                if d1 + sum(k2) > D:
                    continue
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return MultiSeries(self.e, D, out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiSeries):
            return NotImplemented
        D = self._same(other)
        a = {k: v for k, v in self.coeffs.items() if sum(k) <= D}
        b = {k: v for k, v in other.coeffs.items() if sum(k) <= D}
        return a == b

    __hash__ = None

    def truncate(self, D: int) -> "MultiSeries":
        return MultiSeries(self.e, min(D, self.D), self.coeffs)

    def u_order(self) -> int:
        """Largest ``m`` with ``u^m`` dividing the series (``D + 1`` for zero)."""
        return min((k[-1] for k in self.coeffs), default=self.D + 1)

    def shift_u(self, m: int) -> "MultiSeries":
        """Divide by ``u^m`` (exact; the truncation degree drops by ``m``)."""
        out = {}
        for k, v in self.coeffs.items():
            if k[-1] < m:
                raise ValueError("not divisible")
            out[k[:-1] + (k[-1] - m,)] = v
        return MultiSeries(self.e, self.D - m, out)

    def inverse(self) -> "MultiSeries":
        """Inverse of a series with nonzero constant term."""
        zero = (0,) * (self.e + 1)
        c0 = self.coeffs.get(zero)
        if not c0:
            raise ZeroDivisionError("constant term vanishes")
        rest = (self - MultiSeries(self.e, self.D, {zero: c0})) * (1 / c0)
        acc = MultiSeries.one(self.e, self.D)
        term = MultiSeries.one(self.e, self.D)
        for _ in range(self.D):
            term = term * (-rest)
            acc = acc + term
        return acc * (1 / c0)

    def __repr__(self):
        return f"MultiSeries(e={self.e}, D={self.D}, {dict(sorted(self.coeffs.items()))})"


# substitution ------------------------------------------------------------------

def substitute(series: MultiSeries, assignment: dict[int, object]) -> MultiSeries:
    """Replace ``x_v`` by ``("x", w)``, ``"u"`` or a scalar; unassigned variables are kept."""
    e, D = series.e, series.D
    out: dict[Key, Fraction] = {}
    for k, c in series.coeffs.items():
        new = [0] * e + [k[-1]]
        coef = c
        for v in range(e):
            nv = k[v]
            if not nv:
                continue
            tgt = assignment.get(v, ("x", v))
            if tgt == "u":
                new[e] += nv
            elif isinstance(tgt, tuple) and tgt[0] == "x":
                new[tgt[1]] += nv
            else:
                coef *= Fraction(tgt) ** nv
                if not coef:
                    break
        if coef and sum(new) <= D:
            key = tuple(new)
            out[key] = out.get(key, 0) + coef
    return MultiSeries(e, D, out)


def specialize(series: MultiSeries, S: frozenset[int]) -> MultiSeries:
    """``𝕃((x_S, (u)_{E∖S}), u)``."""
    return substitute(series, {v: "u" for v in range(series.e) if v not in S})


def diagonal(series: MultiSeries) -> MultiSeries:
    return specialize(series, frozenset())


def check_parity(series: MultiSeries, sign: int) -> bool:
    """``𝕃(x, -u) = sign · 𝕃(x, u)``."""
    return all((-1) ** k[-1] == sign for k in series.coeffs)


def support_size(n: tuple[int, ...]) -> int:
    return sum(1 for x in n if x)


# scenarios ----------------------------------------------------------------------

def qualifying(e: int, sign: int) -> list[frozenset[int]]:
    """Subsets ``S`` with ``(-1)^{|E∖S|} = -sign``."""
    out = []
    for r in range(e + 1):
        for S in combinations(range(e), r):
            if (-1) ** (e - r) == -sign:
                out.append(frozenset(S))
    return out


def _subsets(e: int) -> list[frozenset[int]]:
    return [frozenset(S) for r in range(e + 1) for S in combinations(range(e), r)]


def required_u_order(e: int, sign: int, S: frozenset[int]) -> int:
    """Power of ``u`` forced to divide the ``S``-specialisation by the hypotheses."""
    m = e - len(S)
    if S in set(qualifying(e, sign)):
        return m + 1
    if not S:
        return m
    return 0


@dataclass
class FamilyScenario:
    e: int
    sign: int
    D: int
    top: MultiSeries
    improved: dict[frozenset[int], MultiSeries] = field(default_factory=dict)
    euler: dict[tuple[frozenset[int], int], MultiSeries] = field(default_factory=dict)

    def copy(self) -> "FamilyScenario":
        return FamilyScenario(self.e, self.sign, self.D, self.top.copy(), dict(self.improved), dict(self.euler))


def _monomials(e: int, D: int, sign: int) -> list[Key]:
    out = []

    def rec(prefix, left):
        if len(prefix) == e:
            for i in range(left + 1):
                if (-1) ** i == sign:
                    out.append(tuple(prefix) + (i,))
            return
        for a in range(left + 1):
            rec(prefix + [a], left - a)

    rec([], D)
    return out


@lru_cache(maxsize=None)
def _hypothesis_basis(e: int, sign: int, D: int) -> tuple[tuple[Key, ...], tuple[tuple[tuple[int, Fraction], ...], ...]]:
    """Exact basis of series with the given parity satisfying every forced ``u``-divisibility."""
    mons = _monomials(e, D, sign)
    index = {m: j for j, m in enumerate(mons)}
    rows: list[dict[int, Fraction]] = []
    for S in _subsets(e):
        need = required_u_order(e, sign, S)
        if not need:
            continue
        groups: dict[Key, dict[int, Fraction]] = {}
        for m in mons:
            q = m[-1] + sum(m[v] for v in range(e) if v not in S)
            if q >= need:
                continue
            key = tuple(m[v] if v in S else 0 for v in range(e)) + (q,)
            groups.setdefault(key, {})[index[m]] = Fraction(1)
        rows.extend(groups.values())
    basis = _sparse_nullspace(rows, len(mons))
    return tuple(mons), tuple(tuple(sorted(b.items())) for b in basis)


def _sparse_nullspace(rows: list[dict[int, Fraction]], n: int) -> list[dict[int, Fraction]]:
    pivots: dict[int, dict[int, Fraction]] = {}
    for row in rows:
        r = dict(row)
        # reduce against existing pivots
        changed = True
        while changed and r:
            changed = False
            for c in list(r):
                if c in pivots and c in r:
                    f = r[c]
                    for cc, vv in pivots[c].items():
                        x = r.get(cc, 0) - f * vv
                        if x:
                            r[cc] = x
                        else:
                            r.pop(cc, None)
                    changed = True
        if not r:
            continue
        c = min(r)
        inv = 1 / r[c]
        r = {cc: vv * inv for cc, vv in r.items()}
        # keep pivots fully reduced
        for pc, prow in pivots.items():
            if c in prow:
                f = prow[c]
                for cc, vv in r.items():
                    x = prow.get(cc, 0) - f * vv
                    if x:
                        prow[cc] = x
                    else:
                        prow.pop(cc, None)
        pivots[c] = r
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = {f: Fraction(1)}
        for pc, prow in pivots.items():
            if f in prow:
                v[pc] = -prow[f]
        basis.append(v)
    return basis


def _random_unit(e: int, D: int, rng: random.Random, vars_: list[int]) -> MultiSeries:
    s = MultiSeries.one(e, D)
    s = s + MultiSeries.u(e, D) * rng.randint(-3, 3)
    for v in vars_:
        s = s + MultiSeries.x(e, D, v) * rng.randint(-3, 3)
    return s


def synthesize_scenario(e: int, sign: int, D: int | None = None, seed: int = 0) -> FamilyScenario:
    """A random scenario satisfying parity, the factorisations and every ``(H_S)``."""
    D = e + 3 if D is None else D
    if D < e + 2:
        raise ResizeError(f"need D ≥ e + 2 = {e + 2}")
    if sign not in (1, -1):
        raise ValueError("sign must be ±1")
    mons, basis = _hypothesis_basis(e, sign, D)
    if not basis:
        raise ResizeError("no nonzero series satisfies the hypotheses at this truncation")
    rng = random.Random(f"{e}:{sign}:{D}:{seed}")
    coeffs: dict[Key, Fraction] = {}
    for vec in basis:
        c = rng.randint(-4, 4)
        if not c:
            continue
        for j, x in vec:
            coeffs[mons[j]] = coeffs.get(mons[j], 0) + c * x
    top = MultiSeries(e, D, coeffs)
    sc = FamilyScenario(e, sign, D, top)
    for S in _subsets(e):
        if len(S) == e:
            continue
        spec = specialize(top, S)
        vanish = required_u_order(e, sign, S) > 0
        prod = MultiSeries.one(e, D)
        for v in range(e):
            if v in S:
                continue
            unit = _random_unit(e, D, rng, sorted(S))
            c = unit * MultiSeries.u(e, D) if vanish else unit
            sc.euler[(S, v)] = c
            prod = prod * c
        m = prod.u_order()
        unit_part = prod.shift_u(m) if m else prod
        quotient = (spec.shift_u(m) if m else spec) * unit_part.inverse()
        sc.improved[S] = quotient.truncate(D - m)
    report = hypothesis_check(sc)
    if report:
        raise RuntimeError(f"synthesised scenario violates its own hypotheses: {report[:3]}")
    return sc


# checks -----------------------------------------------------------------------

def hypothesis_check(sc: FamilyScenario) -> list[str]:
    """Violations of parity, factorisation or ``(H_S)``."""
    out = []
    e, top = sc.e, sc.top
    if not check_parity(top, sc.sign):
        out.append("parity")
    for S, LS in sc.improved.items():
        spec = specialize(top, S)
        prod = MultiSeries.one(e, sc.D)
        for v in range(e):
            if v not in S:
                prod = prod * sc.euler[(S, v)]
        # LS is known to degree D - m and prod is u^m times a unit, so the product is exact to D - m + m
        m = prod.u_order()
        top_deg = min(sc.D, LS.D + m)
        lifted = MultiSeries(e, top_deg, LS.coeffs)
        if (lifted * prod.truncate(top_deg)) != spec.truncate(top_deg):
            out.append(f"factorisation S={sorted(S)}")
    for S in qualifying(e, sc.sign):
        spec = specialize(top, S)
        if spec.u_order() < e - len(S) + 1:
            out.append(f"H_S S={sorted(S)}")
    return out


def conclusion_violations(series: MultiSeries, e: int) -> list[str]:
    """Failures of ``a_i(n) = 0`` for ``‖n‖ < e - i`` and of ``Σ_{|n| = e-i} a_i(n) = 0`` (``i < e``)."""
    out = []
    sums: dict[int, Fraction] = {}
    for k, c in series.coeffs.items():
        n, i = k[:-1], k[-1]
        if i >= e:
            continue
        if support_size(n) < e - i:
            out.append(f"a_{i}{n} = {c}")
        if sum(n) == e - i:
            sums[i] = sums.get(i, 0) + c
    for i, s in sorted(sums.items()):
        if s:
            out.append(f"sum_{{|n|={e - i}}} a_{i}(n) = {s}")
    return out


@dataclass
class VanishingReport:
    hypothesis_violations: list[str]
    conclusion_violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.hypothesis_violations and not self.conclusion_violations


def verify_vanishing(sc: FamilyScenario) -> VanishingReport:
    return VanishingReport(hypothesis_check(sc), conclusion_violations(sc.top, sc.e))


@dataclass
class DiagonalResult:
    lhs: Fraction
    rhs: Fraction
    equal: bool
    order: int


def diagonal_derivative(obj: FamilyScenario | MultiSeries, e: int | None = None) -> DiagonalResult:
    """``e!·[u^e] 𝕃((u), u)`` against ``e!·a_e(0)``, with the ``u``-order of the diagonal."""
    series = obj.top if isinstance(obj, FamilyScenario) else obj
    e = series.e if e is None else e
    if series.D < e:
        raise ResizeError("truncation below e")
    diag = diagonal(series)
    f = factorial(e)
    lhs = f * diag.a(e, (0,) * series.e)
    rhs = f * series.a(e, (0,) * series.e)
    return DiagonalResult(lhs, rhs, lhs == rhs, diag.u_order())


def mutate(sc: FamilyScenario, rng: random.Random) -> tuple[FamilyScenario, Key, Fraction]:
    """Add a random nonzero integer to one coefficient of the top series."""
    e, D = sc.e, sc.D
    while True:
        n = [rng.randint(0, D) for _ in range(e + 1)]
        if sum(n) <= D:
            break
    key = tuple(n)
    delta = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
    new = sc.copy()
    coeffs = dict(new.top.coeffs)
    coeffs[key] = coeffs.get(key, 0) + delta
    new.top = MultiSeries(e, D, coeffs)
    return new, key, delta


def mutation_run(scenarios: list[FamilyScenario], count: int, seed: int = 0) -> tuple[int, list[tuple]]:
    """Corrupt ``count`` scenarios (cycling through the list); return the number caught and the escapes."""
    rng = random.Random(f"mut:{seed}")
    caught, escapes = 0, []
    for t in range(count):
        sc = scenarios[t % len(scenarios)]
        bad, key, delta = mutate(sc, rng)
        rep = verify_vanishing(bad)
        if not rep.ok or not diagonal_derivative(bad).equal:
            caught += 1
        else:
            escapes.append((sc.e, sc.sign, key, delta))
    return caught, escapes


def residual_ideal_note(sc: FamilyScenario) -> dict:
    """Lowest total degree present, and whether every degree-``e`` term is a multiple of ``u^e``."""
    degs = [sum(k) for k in sc.top.coeffs]
    low = min(degs) if degs else None
    pure = all(k[-1] == sc.e for k in sc.top.coeffs if sum(k) == sc.e)
    return {"lowest_degree": low, "degree_e_only_u^e": pure}
