"""Classical modular symbols for Γ0(N) in even weight k.

A symbol is a Γ0(N)-equivariant map ``φ`` from degree-zero divisors on
the cusps to the dual ``V`` of polynomials of degree ``≤ g = k - 2``.  It
is stored by its values ``m_x = φ(g_x · D0)`` on Manin generators, where
``D0 = {∞} - {0}`` and ``g_x ∈ SL2(Z)`` has bottom row ``x ∈ P^1(Z/N)``.
A value ``m ∈ V`` is recorded by its moments ``m(z^j)``, ``0 ≤ j ≤ g``.

Matrices act on polynomials by ``(P|γ)(z) = (cz+d)^g P((az+b)/(cz+d))``
and on ``V`` by ``(γ·m)(P) = m(P|γ)``.  Hecke operators are
``(Tφ)(D) = Σ_δ δ·φ(δ^{-1} D)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd

from . import linalg
from .cyclo import CycloElement, DirichletChar
from .padic import PadicNumber, padic_from_rational

Mat2 = tuple[int, int, int, int]
Cusp = tuple[int, int]
INF: Cusp = (1, 0)

MAX_ROWS = 4000


class MultiplicityError(ValueError):
    """The requested eigenspace is not a line."""


class RegularityError(ValueError):
    """The two roots of the Hecke polynomial coincide or have equal slope."""


class SizeError(ValueError):
    """Dense linear algebra guard exceeded."""


# 2x2 integer matrices ---------------------------------------------------

def mat_mul(A: Mat2, B: Mat2) -> Mat2:
    a, b, c, d = A
    e, f, g, h = B
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def mat_adj(A: Mat2) -> Mat2:
    a, b, c, d = A
    return (d, -b, -c, a)


def mat_det(A: Mat2) -> int:
    return A[0] * A[3] - A[1] * A[2]


def act_cusp(A: Mat2, z: Cusp) -> Cusp:
    a, b, c, d = A
    x, y = z
    u, v = a * x + b * y, c * x + d * y
    g = gcd(u, v)
    u, v = u // g, v // g
    if v < 0 or (v == 0 and u < 0):
        u, v = -u, -v
    return (u, v)


S_MAT: Mat2 = (0, -1, 1, 0)
TAU_MAT: Mat2 = (0, -1, 1, -1)
T_MAT: Mat2 = (1, 1, 0, 1)
IOTA: Mat2 = (-1, 0, 0, 1)


@lru_cache(maxsize=4096)
def poly_action(gam: Mat2, g: int) -> tuple[tuple[int, ...], ...]:
    """``A[j][i]`` = coefficient of ``z^i`` in ``(az+b)^j (cz+d)^(g-j)``."""
    a, b, c, d = gam
    rows = []
    for j in range(g + 1):
        p1 = [comb(j, i) * a**i * b ** (j - i) for i in range(j + 1)]
        p2 = [comb(g - j, i) * c**i * d ** (g - j - i) for i in range(g - j + 1)]
        out = [0] * (g + 1)
        for i, x in enumerate(p1):
            if x:
                for l, y in enumerate(p2):
                    out[i + l] += x * y
        rows.append(tuple(out))
    return tuple(rows)


def _apply_poly(A, m):
    return [sum((a * x for a, x in zip(row, m) if a), Fraction(0)) for row in A]


# P^1(Z/N) and Manin generators ---------------------------------------------

class P1List:
    """Points of ``P^1(Z/N)`` with SL2(Z) lifts and coset transitions."""

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("level must be positive")
        self.N = N
        units = [u for u in range(N) if gcd(u, N) == 1] if N > 1 else [0]
        lookup: dict[tuple[int, int], int] = {}
        reps: list[tuple[int, int]] = []
        for c in range(N):
            for d in range(N):
                if (c, d) in lookup or gcd(gcd(c, d), N) != 1:
                    continue
                orbit = {((u * c) % N, (u * d) % N) for u in units} if N > 1 else {(0, 0)}
                rep = min(orbit)
                idx = len(reps)
                reps.append(rep)
                for pr in orbit:
                    lookup[pr] = idx
        # put (0:1) first, the class of the identity matrix
        first = lookup[(0, 1 % N)]
        order = [first] + [i for i in range(len(reps)) if i != first]
        remap = {old: new for new, old in enumerate(order)}
        self.reps = [reps[i] for i in order]
        self._lookup = {k: remap[v] for k, v in lookup.items()}
        self.lifts = [self._lift(c, d) for c, d in self.reps]

    def __len__(self):
        return len(self.reps)

    def _lift(self, c: int, d: int) -> Mat2:
        N = self.N
        if c % N == 0 and N > 1:
            c = 0
        if c == 0:
            if (d - 1) % N == 0:
                return (1, 0, 0, 1)
            if (d + 1) % N == 0:
                return (-1, 0, 0, -1)
            c = N
        j = 0
        while True:
            dd = d + j * N
            if gcd(c, dd) == 1:
                break
            j += 1
        # a*dd - b*c = 1
        g, x, y = _egcd(dd, c)
        a, b = x, -y
        assert a * dd - b * c == 1
        return (a, b, c, dd)

    def index(self, c: int, d: int) -> int:
        N = self.N
        return self._lookup[(c % N, d % N)] if N > 1 else 0

    def transition(self, g: Mat2) -> tuple[Mat2, int]:
        """``(γ, x)`` with ``g = γ g_x`` and ``γ ∈ Γ0(N)``; ``det g`` must be 1."""
        x = self.index(g[2], g[3])
        gam = mat_mul(g, mat_adj(self.lifts[x]))
        return gam, x

    def cusp_terms(self, z: Cusp) -> list[tuple[Mat2, int, int]]:
        """Terms ``(γ, y, c)`` with ``φ({z} - {∞}) = Σ c·γ·m_y``."""
        a, b = z
        if b == 0:
            return []
        out = []
        p_prev2, q_prev2 = 0, 1
        p_prev, q_prev = 1, 0
        i = 0
        x, y = a, b
        while True:
            q, r = divmod(x, y)
            pi, qi = q * p_prev + p_prev2, q * q_prev + q_prev2
            if i % 2 == 1:
                g = (pi, p_prev, qi, q_prev)
            else:
                g = (-pi, p_prev, -qi, q_prev)
            gam, idx = self.transition(g)
            out.append((gam, idx, 1))
            p_prev2, q_prev2, p_prev, q_prev = p_prev, q_prev, pi, qi
            i += 1
            if r == 0:
                break
            x, y = y, r
        return out

    def divisor_terms(self, s: Cusp, r: Cusp) -> list[tuple[Mat2, int, int]]:
        """Terms for ``φ({s} - {r})``."""
        return self.cusp_terms(s) + [(g, y, -c) for g, y, c in self.cusp_terms(r)]


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


@lru_cache(maxsize=None)
def p1list(N: int) -> P1List:
    return P1List(N)


Terms = list[list[tuple[Mat2, int, int]]]


def _merge(terms: list[tuple[Mat2, int, int]]) -> list[tuple[Mat2, int, int]]:
    acc: dict[tuple[Mat2, int], int] = {}
    for g, y, c in terms:
        acc[(g, y)] = acc.get((g, y), 0) + c
    return [(g, y, c) for (g, y), c in acc.items() if c]


def hecke_terms(P: P1List, deltas: list[Mat2]) -> Terms:
    """Per generator ``x``, the terms of ``Σ_δ δ·φ(δ^{-1} g_x D0)``."""
    out: Terms = []
    for gx in P.lifts:
        row = []
        s, r = act_cusp(gx, INF), act_cusp(gx, (0, 1))
        for dl in deltas:
            adj = mat_adj(dl)
            for gam, y, c in P.divisor_terms(act_cusp(adj, s), act_cusp(adj, r)):
                row.append((mat_mul(dl, gam), y, c))
        out.append(_merge(row))
    return out


def involution_terms(P: P1List) -> Terms:
    """Terms of ``(ιφ)(D) = ι·φ(ιD)`` with ``ι = diag(-1, 1)``."""
    out: Terms = []
    for a, b, c, d in P.lifts:
        gam, y = P.transition((a, -b, -c, d))
        out.append([(mat_mul(IOTA, gam), y, 1)])
    return out


def fricke_terms(P: P1List) -> Terms:
    N = P.N
    return hecke_terms(P, [(0, -1, N, 0)])


def up_deltas(p: int) -> list[Mat2]:
    return [(p, b, 0, 1) for b in range(p)]


def tl_deltas(l: int) -> list[Mat2]:
    return [(1, 0, 0, l)] + [(l, b, 0, 1) for b in range(l)]


def hecke_deltas(l: int, N: int) -> list[Mat2]:
    return up_deltas(l) if N % l == 0 else tl_deltas(l)


def apply_terms(terms: Terms, values: list[list], g: int) -> list[list]:
    out = []
    for row in terms:
        acc = [Fraction(0)] * (g + 1)
        for gam, y, c in row:
            v = _apply_poly(poly_action(gam, g), values[y])
            for j in range(g + 1):
                acc[j] += c * v[j]
        out.append(acc)
    return out


# the space --------------------------------------------------------------

def _flatten(values: list[list]) -> list:
    return [x for v in values for x in v]


def _unflatten(vec: list, g: int) -> list[list]:
    return [list(vec[i:i + g + 1]) for i in range(0, len(vec), g + 1)]


def primes_up_to(n: int) -> list[int]:
    return [q for q in range(2, n + 1) if all(q % r for r in range(2, int(q**0.5) + 1))]


class ManinSymbolSpace:
    """All Γ0(N)-equivariant symbols of weight ``k``, as the solution space of the Manin relations."""

    def __init__(self, N: int, k: int):
        if k < 2 or k % 2:
            raise ValueError("weight must be even and at least 2")
        P = p1list(N)
        g = k - 2
        n = len(P) * (g + 1)
        if N * (k - 1) > MAX_ROWS:
            raise SizeError(f"N*(k-1) = {N * (k - 1)} exceeds the dense guard {MAX_ROWS}")
        self.N, self.k, self.g, self.P = N, k, g, P
        self.ambient_dim = n
        rows = []
        for x, gx in enumerate(P.lifts):
            for rel in ((S_MAT,), (TAU_MAT, mat_mul(TAU_MAT, TAU_MAT))):
                block = {x: [[Fraction(int(i == j)) for i in range(g + 1)] for j in range(g + 1)]}
                for s in rel:
                    gam, y = P.transition(mat_mul(gx, s))
                    A = poly_action(gam, g)
                    cur = block.setdefault(y, [[Fraction(0)] * (g + 1) for _ in range(g + 1)])
                    for j in range(g + 1):
                        for i in range(g + 1):
                            cur[j][i] += A[j][i]
                for j in range(g + 1):
                    row = [Fraction(0)] * n
                    for y, B in block.items():
                        for i in range(g + 1):
                            row[y * (g + 1) + i] += B[j][i]
                    rows.append(row)
        self.relation_rank = linalg.rank(rows, n)
        self.basis = linalg.nullspace(rows, n)
        self._solver = linalg.SpanSolver(self.basis) if self.basis else None
        self._ops: dict = {}

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def coordinates(self, values: list[list]) -> list[Fraction]:
        if self._solver is None:
            if any(_flatten(values)):
                raise ValueError("not a symbol")
            return []
        return self._solver(_flatten(values))

    def element(self, coords: list) -> list[list]:
        vec = [Fraction(0)] * self.ambient_dim
        for c, b in zip(coords, self.basis):
            if c:
                for i, x in enumerate(b):
                    if x:
                        vec[i] += c * x
        return _unflatten(vec, self.g)

    def _matrix(self, terms: Terms) -> linalg.Matrix:
        cols = []
        for b in self.basis:
            img = apply_terms(terms, _unflatten(b, self.g), self.g)
            cols.append(self.coordinates(img))
        d = self.dimension
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def hecke_matrix(self, l: int) -> linalg.Matrix:
        key = ("T", l)
        if key not in self._ops:
            self._ops[key] = self._matrix(hecke_terms(self.P, hecke_deltas(l, self.N)))
        return self._ops[key]

    def involution_matrix(self) -> linalg.Matrix:
        if "iota" not in self._ops:
            self._ops["iota"] = self._matrix(involution_terms(self.P))
        return self._ops["iota"]

    def fricke_matrix(self) -> linalg.Matrix:
        if "W" not in self._ops:
            self._ops["W"] = self._matrix(fricke_terms(self.P))
        return self._ops["W"]

    def boundary_basis(self) -> linalg.Matrix:
        """Coordinates of the symbols ``{s} - {r} ↦ F(s) - F(r)`` for equivariant ``F`` on cusps."""
        if "bdry" in self._ops:
            return self._ops["bdry"]
        P, g = self.P, self.g
        n = self.ambient_dim
        rows = []
        for x, gx in enumerate(P.lifts):
            gam, y = P.transition(mat_mul(gx, T_MAT))
            A = poly_action(gam, g)
            for j in range(g + 1):
                row = [Fraction(0)] * n
                row[x * (g + 1) + j] += 1
                for i in range(g + 1):
                    row[y * (g + 1) + i] -= A[j][i]
                rows.append(row)
        Fs = linalg.nullspace(rows, n)
        images = []
        for F in Fs:
            f = _unflatten(F, g)
            vals = []
            for x, gx in enumerate(P.lifts):
                gam, y = P.transition(mat_mul(gx, S_MAT))
                w = _apply_poly(poly_action(gam, g), f[y])
                vals.append([f[x][j] - w[j] for j in range(g + 1)])
            images.append(self.coordinates(vals))
        R, _ = linalg.rref(images, self.dimension)
        self._ops["bdry"] = R
        return R

    def cuspidal_basis(self) -> linalg.Matrix:
        """Coordinates spanning the Hecke-stable complement of the boundary symbols."""
        if "cusp" in self._ops:
            return self._ops["cusp"]
        d = self.dimension
        B = self.boundary_basis()
        if not B:
            out = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
        else:
            T = self._generic_hecke()
            solver = linalg.SpanSolver(B)
            # restriction of T to the boundary, in boundary coordinates
            TB_cols = [solver(linalg.matvec(T, b)) for b in B]
            nb = len(B)
            TB = [[TB_cols[j][i] for j in range(nb)] for i in range(nb)]
            cp = linalg.charpoly(TB)
            PT = linalg.poly_of_matrix(cp, T)
            cols = [[PT[i][j] for i in range(d)] for j in range(d)]
            out, _ = linalg.rref(cols, d)
        self._ops["cusp"] = out
        return out

    def _generic_hecke(self) -> linalg.Matrix:
        d = self.dimension
        T = [[Fraction(0)] * d for _ in range(d)]
        ls = [l for l in primes_up_to(30) if self.N % l][:3]
        for coeff, l in zip((1, 3, 7), ls):
            H = self.hecke_matrix(l)
            for i in range(d):
                for j in range(d):
                    T[i][j] += coeff * H[i][j]
        return T

    def cuspidal_dimension(self) -> int:
        return len(self.cuspidal_basis())


@lru_cache(maxsize=32)
def build_space(N: int, k: int) -> ManinSymbolSpace:
    return ManinSymbolSpace(N, k)


# symbols ----------------------------------------------------------------

@dataclass
class ClassicalSymbol:
    N: int
    k: int
    values: list[list[Fraction]]
    eigenvalues: dict[int, Fraction] = field(default_factory=dict)
    sign: int = 0
    scale: Fraction = Fraction(1)

    @property
    def g(self) -> int:
        return self.k - 2

    @property
    def P(self) -> P1List:
        return p1list(self.N)

    def at_cusp(self, z: Cusp) -> list[Fraction]:
        """``φ({z} - {∞})`` as moments."""
        acc = [Fraction(0)] * (self.g + 1)
        for gam, y, c in self.P.cusp_terms(z):
            v = _apply_poly(poly_action(gam, self.g), self.values[y])
            for j in range(self.g + 1):
                acc[j] += c * v[j]
        return acc

    def evaluate(self, s: Cusp, r: Cusp) -> list[Fraction]:
        """``φ({s} - {r})`` as moments ``φ(...)(z^j)``."""
        a, b = self.at_cusp(s), self.at_cusp(r)
        return [x - y for x, y in zip(a, b)]

    def apply(self, terms: Terms) -> list[list[Fraction]]:
        return apply_terms(terms, self.values, self.g)

    def scaled(self, c) -> "ClassicalSymbol":
        c = Fraction(c)
        return ClassicalSymbol(self.N, self.k, [[x * c for x in v] for v in self.values],
                               dict(self.eigenvalues), self.sign, self.scale * c)

    def __add__(self, other: "ClassicalSymbol") -> "ClassicalSymbol":
        if (self.N, self.k) != (other.N, other.k):
            raise ValueError("symbols of different level or weight")
        vals = [[x + y for x, y in zip(a, b)] for a, b in zip(self.values, other.values)]
        ev = {l: a for l, a in self.eigenvalues.items() if other.eigenvalues.get(l) == a}
        return ClassicalSymbol(self.N, self.k, vals, ev, 0, Fraction(1))

    def pair(self, s: Cusp, r: Cusp, poly: list) -> Fraction:
        """``φ({s} - {r})(P)`` for ``P = Σ poly[i] z^i``."""
        m = self.evaluate(s, r)
        return sum((Fraction(c) * x for c, x in zip(poly, m)), Fraction(0))


def _schreier_gammas(P: P1List) -> list[Mat2]:
    out = []
    for gx in P.lifts:
        for s in (S_MAT, T_MAT):
            gam, _ = P.transition(mat_mul(gx, s))
            out.append(gam)
    return out


def _rat_gcd(xs: list[Fraction]) -> Fraction:
    num, den = 0, 1
    for x in xs:
        if x:
            num = gcd(num, x.numerator)
            den = den * x.denominator // gcd(den, x.denominator)
    return Fraction(num, den)


def normalize(sym: ClassicalSymbol) -> ClassicalSymbol:
    """Scale so the values on the cycles ``(1 + ε ι) c`` generate ``Z``; fix the sign.

    For a sign-``ε`` symbol these values are twice the values on closed paths
    ``c = {γ∞} - {∞}``, so the closed-path values generate ``(1/2) Z``.  At
    ``k = 2`` this is the usual real/imaginary period normalisation.
    """
    vals = []
    for gam in _schreier_gammas(sym.P):
        vals.extend(sym.evaluate(act_cusp(gam, INF), INF))
    G = 2 * _rat_gcd(vals)
    if G == 0:
        G = _rat_gcd(_flatten(sym.values))
    if G == 0:
        raise ValueError("zero symbol")
    out = sym.scaled(1 / G)
    lead = next((x for x in out.evaluate(INF, (0, 1)) + _flatten(out.values) if x), None)
    if lead is not None and lead < 0:
        out = out.scaled(-1)
    out.scale = Fraction(1)
    return out


def eigen_symbol(space: ManinSymbolSpace, record: dict[int, int], sign: int) -> ClassicalSymbol:
    """The symbol line cut out by ``T_ℓ = a_ℓ`` for the record and ``ι = sign``."""
    d = space.dimension
    if d == 0:
        raise MultiplicityError("eigenspace has dimension 0")
    rows = []
    for l, a in record.items():
        T = space.hecke_matrix(l)
        for i in range(d):
            rows.append([T[i][j] - (a if i == j else 0) for j in range(d)])
    I = space.involution_matrix()
    for i in range(d):
        rows.append([I[i][j] - (sign if i == j else 0) for j in range(d)])
    ker = linalg.nullspace(rows, d)
    if len(ker) != 1:
        raise MultiplicityError(f"eigenspace has dimension {len(ker)}")
    sym = ClassicalSymbol(space.N, space.k, space.element(ker[0]),
                          {l: Fraction(a) for l, a in record.items()}, sign)
    return normalize(sym)


def hecke_eigenvalue(sym: ClassicalSymbol, l: int) -> Fraction:
    """Eigenvalue of ``T_ℓ`` (or ``U_ℓ`` for ``ℓ | N``) on an eigensymbol."""
    img = sym.apply(hecke_terms(sym.P, hecke_deltas(l, sym.N)))
    return _ratio(img, sym.values)


def _ratio(img, vals) -> Fraction:
    lam = None
    for a, b in zip(_flatten(img), _flatten(vals)):
        if b:
            lam = Fraction(a) / b
            break
    if lam is None:
        raise ValueError("zero symbol")
    if any(a != lam * b for a, b in zip(_flatten(img), _flatten(vals))):
        raise MultiplicityError("not an eigensymbol")
    return lam


def fricke_eigenvalue(sym: ClassicalSymbol) -> Fraction:
    return _ratio(sym.apply(fricke_terms(sym.P)), sym.values)


def root_number(sym: ClassicalSymbol) -> int:
    """Global root number ``(-1)^{k/2}·w_N`` from the Fricke action ``w_N N^{g/2}`` on a newform symbol."""
    lam = fricke_eigenvalue(sym)
    w = lam / Fraction(sym.N) ** (sym.g // 2)
    if w not in (1, -1):
        raise ValueError("symbol is not a newform line (Fricke eigenvalue not ±N^{g/2})")
    return int((-1) ** (sym.k // 2) * w)


# p-stabilisation ---------------------------------------------------------

@dataclass
class StabilizedSymbol:
    """``φ_α = c0 + α·c1`` at level ``Np`` with ``α^2 = a_p α - p^{k-1}``; ``c1 = 0`` for Steinberg forms."""

    p: int
    k: int
    a_p: Fraction
    c0: ClassicalSymbol
    c1: ClassicalSymbol | None

    @property
    def N(self) -> int:
        return self.c0.N

    def residual(self) -> Fraction:
        """Largest coordinate of ``U_p φ_α - α φ_α`` computed in ``Q(α)``."""
        terms = hecke_terms(self.c0.P, up_deltas(self.p))
        u0 = _flatten(self.c0.apply(terms))
        if self.c1 is None:
            diff = [a - self.a_p * b for a, b in zip(u0, _flatten(self.c0.values))]
            return max((abs(x) for x in diff), default=Fraction(0))
        u1 = _flatten(self.c1.apply(terms))
        q = Fraction(self.p) ** (self.k - 1)
        c0, c1 = _flatten(self.c0.values), _flatten(self.c1.values)
        # α(c0 + α c1) = -q c1 + α(c0 + a_p c1)
        d0 = [a + q * y for a, y in zip(u0, c1)]
        d1 = [b - (x + self.a_p * y) for b, x, y in zip(u1, c0, c1)]
        return max((abs(x) for x in d0 + d1), default=Fraction(0))

    def padic_values(self, alpha: PadicNumber, M: int) -> list[list[PadicNumber]]:
        p = self.p
        out = []
        for i, v0 in enumerate(self.c0.values):
            row = []
            for j, x in enumerate(v0):
                val = padic_from_rational(x.numerator, x.denominator, p, M)
                if self.c1 is not None:
                    y = self.c1.values[i][j]
                    if y:
                        val = val + alpha * padic_from_rational(y.numerator, y.denominator, p, M)
                row.append(val)
            out.append(row)
        return out


def level_raise(sym: ClassicalSymbol, M: int) -> ClassicalSymbol:
    """The same symbol viewed at level ``M`` (a multiple of its level)."""
    P = p1list(M)
    vals = [sym.evaluate(act_cusp(gx, INF), act_cusp(gx, (0, 1))) for gx in P.lifts]
    return ClassicalSymbol(M, sym.k, vals, dict(sym.eigenvalues), sym.sign, sym.scale)


def p_stabilize(sym: ClassicalSymbol, p: int, a_p: int | Fraction | None = None) -> StabilizedSymbol:
    """``φ_α(D) = φ(D) - α^{-1}·ν·φ(ν^{-1} D)`` with ``ν = diag(1, p)``, symbolic in ``α``."""
    if a_p is None:
        a_p = sym.eigenvalues.get(p)
        if a_p is None:
            a_p = hecke_eigenvalue(sym, p)
    a_p = Fraction(a_p)
    if sym.N % p == 0:
        return StabilizedSymbol(p, sym.k, a_p, sym, None)
    q = Fraction(p) ** (sym.k - 1)
    if a_p * a_p == 4 * q:
        raise RegularityError("α = β")
    g = sym.g
    Np = sym.N * p
    P = p1list(Np)
    base, psi = [], []
    for gx in P.lifts:
        s, r = act_cusp(gx, INF), act_cusp(gx, (0, 1))
        base.append(sym.evaluate(s, r))
        w = sym.evaluate(act_cusp((p, 0, 0, 1), s), act_cusp((p, 0, 0, 1), r))
        psi.append([Fraction(p) ** (g - j) * w[j] for j in range(g + 1)])
    c0 = [[b - a_p / q * y for b, y in zip(bv, pv)] for bv, pv in zip(base, psi)]
    c1 = [[y / q for y in pv] for pv in psi]
    ev = dict(sym.eigenvalues)
    ev.pop(p, None)
    return StabilizedSymbol(
        p, sym.k, a_p,
        ClassicalSymbol(Np, sym.k, c0, ev, sym.sign, sym.scale),
        ClassicalSymbol(Np, sym.k, c1, ev, sym.sign, sym.scale),
    )


# special values ----------------------------------------------------------

def twisted_terms(sym: ClassicalSymbol, m: int, j: int) -> list[tuple[int, Fraction]]:
    """``t_a = φ({∞} - {-a/m})((mz + a)^j)`` for ``a mod m`` prime to ``m``."""
    out = []
    for a in range(m):
        if gcd(a, m) != 1:
            continue
        vals = sym.evaluate(INF, (-a, m))
        poly = [comb(j, i) * m**i * a ** (j - i) for i in range(j + 1)]
        out.append((a, sum((c * vals[i] for i, c in enumerate(poly)), Fraction(0))))
    return out


def classical_special_value(sym: ClassicalSymbol, chi: DirichletChar, j: int, M: int) -> CycloElement:
    """``Σ_a χ(a) t_a`` over ``a`` mod the conductor of ``χ``, as a cyclotomic p-adic number."""
    if not 0 <= j <= sym.g:
        raise ValueError("j out of range")
    p = chi.p
    m = chi.conductor
    total = CycloElement.scalar(PadicNumber.zero(p, M), chi.level)
    for a, t in twisted_terms(sym, m, j):
        if not t:
            continue
        val = chi.value(a, M) if m > 1 else CycloElement.scalar(PadicNumber(p, 0, 1, M))
        total = total + val * padic_from_rational(t.numerator, t.denominator, p, M)
    return total


def twisted_sum_exact(sym: ClassicalSymbol, chi: DirichletChar, j: int) -> dict[int, Fraction]:
    """Rational coefficients ``t_a`` grouped by ``χ``-exponent, so ``value = Σ_e ζ-part(e) · coeff``."""
    return dict(twisted_terms(sym, chi.conductor, j))


# elliptic curves ---------------------------------------------------------

def curve_ap(ainvs: tuple[int, ...], l: int) -> int:
    """``ℓ + 1 - #E(F_ℓ)`` by counting points on the reduced Weierstrass model."""
    a1, a2, a3, a4, a6 = (a % l for a in ainvs)
    count = 1
    for x in range(l):
        rhs = (x**3 + a2 * x * x + a4 * x + a6) % l
        lin = (a1 * x + a3) % l
        for y in range(l):
            if (y * y + lin * y - rhs) % l == 0:
                count += 1
    return l + 1 - count


def curve_invariants(ainvs: tuple[int, ...]) -> tuple[int, int, int]:
    """``(c4, c6, Δ)``."""
    a1, a2, a3, a4, a6 = ainvs
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    c4 = b2 * b2 - 24 * b4
    c6 = -b2**3 + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return c4, c6, disc


def semistable_conductor(ainvs: tuple[int, ...]) -> int:
    """Conductor of a curve whose bad primes are all multiplicative; raises otherwise."""
    c4, _, disc = curve_invariants(ainvs)
    if disc == 0:
        raise ValueError("singular curve")
    N, n, q = 1, abs(disc), 2
    while n > 1:
        if q * q > n:
            q = n
        if n % q == 0:
            while n % q == 0:
                n //= q
            if c4 % q == 0:
                raise ValueError(f"additive reduction at {q}; give the level explicitly")
            N *= q
        q += 1
    return N


def curve_record(ainvs: tuple[int, ...], N: int, lmax: int = 13) -> dict[int, int]:
    return {l: curve_ap(ainvs, l) for l in primes_up_to(lmax) if N % l}


def rational_newforms(N: int, k: int, lmax: int = 23) -> list[dict[int, int]]:
    """Hecke records ``{ℓ: a_ℓ}`` (``ℓ ∤ N``, ``ℓ ≤ lmax``) of newforms with rational coefficients.

    The plus part of the cuspidal space is split by integer eigenvalues of
    successive ``T_ℓ``; lines that survive every split are new, since old
    forms occur with multiplicity at least two.
    """
    space = build_space(N, k)
    cusp = space.cuspidal_basis()
    if not cusp:
        return []
    d = space.dimension
    I = space.involution_matrix()
    # plus part of the cuspidal span
    rows = [[sum(c[i] * I[r][i] for i in range(d)) - c[r] for r in range(d)] for c in cusp]
    # solve for combinations x with (I - 1) Σ x_i cusp_i = 0
    cols = [[rows[i][r] for i in range(len(cusp))] for r in range(d)]
    comb_ = linalg.nullspace(cols, len(cusp))
    plus = [[sum(x[i] * cusp[i][r] for i in range(len(cusp))) for r in range(d)] for x in comb_]
    pieces: list[tuple[linalg.Matrix, dict[int, int]]] = [(plus, {})]
    for l in primes_up_to(lmax):
        if N % l == 0:
            continue
        T = space.hecke_matrix(l)
        bound = int(2 * l ** ((k - 1) / 2)) + 1
        nxt = []
        for basis, rec in pieces:
            imgs = [linalg.matvec(T, b) for b in basis]
            solver = linalg.SpanSolver(basis)
            Tb = [solver(v) for v in imgs]
            n = len(basis)
            for a in range(-bound, bound + 1):
                eqs = [[Tb[i][r] - (a if i == r else 0) for i in range(n)] for r in range(n)]
                ker = linalg.nullspace(eqs, n)
                if ker:
                    sub = [[sum(x[i] * basis[i][r] for i in range(n)) for r in range(d)] for x in ker]
                    nxt.append((sub, {**rec, l: a}))
        pieces = nxt
    return [rec for basis, rec in pieces if len(basis) == 1]
