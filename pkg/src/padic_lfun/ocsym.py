"""Overconvergent modular symbols and the U_p-eigenlift of a p-stabilised symbol."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .dist import ApproxDistribution, moment_matrix
from .modsym import (
    INF,
    S_MAT,
    TAU_MAT,
    Mat2,
    P1List,
    StabilizedSymbol,
    Terms,
    hecke_terms,
    mat_adj,
    mat_mul,
    p1list,
    tl_deltas,
    up_deltas,
)
from .padic import PadicNumber, PrecisionError, padic_from_rational, valuation


class CriticalSlopeError(ValueError):
    """Slope at least ``k - 1``: the eigenlift is not unique."""


class DivergenceError(RuntimeError):
    """The U_p/α iteration failed to stabilise."""


class LiftError(RuntimeError):
    """No distribution-valued symbol lifts the classical one at this precision."""


GroupRing = list[tuple[int, Mat2, int]]  # (coefficient, γ, free generator)


@dataclass
class Presentation:
    """Every Manin generator written over a set of free generators, plus leftover relations."""

    free: list[int]
    expr: list[GroupRing]
    leftover: list[GroupRing]


def _merge(terms: GroupRing) -> GroupRing:
    acc: dict[tuple[Mat2, int], int] = {}
    for c, g, f in terms:
        acc[(g, f)] = acc.get((g, f), 0) + c
    return [(c, g, f) for (g, f), c in acc.items() if c]


@lru_cache(maxsize=None)
def presentation(N: int) -> Presentation:
    """Eliminate generators through the two- and three-term Manin relations."""
    P = p1list(N)
    n = len(P)
    ident: Mat2 = (1, 0, 0, 1)
    expr: list[GroupRing] = [[(1, ident, x)] for x in range(n)]
    leftover: list[GroupRing] = []
    eliminated: set[int] = set()

    def relation_terms(x: int, mats) -> GroupRing:
        out: GroupRing = [(1, ident, x)]
        for m in mats:
            gam, y = P.transition(mat_mul(P.lifts[x], m))
            out.append((1, gam, y))
        return out

    def expand(rel: GroupRing) -> GroupRing:
        out: GroupRing = []
        for c, g, y in rel:
            for c2, g2, f in expr[y]:
                out.append((c * c2, mat_mul(g, g2), f))
        return _merge(out)

    def substitute(f: int, repl: GroupRing) -> None:
        for y in range(n):
            if any(t[2] == f for t in expr[y]):
                out: GroupRing = []
                for c, g, z in expr[y]:
                    if z == f:
                        for c2, g2, w in repl:
                            out.append((c * c2, mat_mul(g, g2), w))
                    else:
                        out.append((c, g, z))
                expr[y] = _merge(out)

    def eliminate(rel: GroupRing) -> None:
        rel = expand(rel)
        if not rel:
            return
        counts: dict[int, int] = {}
        for _, _, f in rel:
            counts[f] = counts.get(f, 0) + 1
        for c0, g0, f in sorted(rel, key=lambda t: -t[2]):
            if counts[f] == 1 and abs(c0) == 1 and f not in eliminated:
                inv = mat_adj(g0)
                repl = [(-c0 * c, mat_mul(inv, g), w) for c, g, w in rel if w != f]
                substitute(f, _merge(repl))
                eliminated.add(f)
                return
        leftover.append(rel)

    seen: set[int] = set()
    for x in range(n):
        if x in seen:
            continue
        xs = P.index(*_bottom(mat_mul(P.lifts[x], S_MAT)))
        seen.update({x, xs})
        eliminate(relation_terms(x, [S_MAT]))
    seen.clear()
    tau2 = mat_mul(TAU_MAT, TAU_MAT)
    for x in range(n):
        if x in seen:
            continue
        x1 = P.index(*_bottom(mat_mul(P.lifts[x], TAU_MAT)))
        x2 = P.index(*_bottom(mat_mul(P.lifts[x], tau2)))
        seen.update({x, x1, x2})
        eliminate(relation_terms(x, [TAU_MAT, tau2]))
    free = sorted({f for e in expr for _, _, f in e})
    leftover = [r for r in (expand(r) for r in leftover) if r]
    return Presentation(free, expr, leftover)


def _bottom(m: Mat2) -> tuple[int, int]:
    return m[2], m[3]


def relation_list(N: int) -> list[GroupRing]:
    """All two- and three-term Manin relations at level ``N``."""
    P = p1list(N)
    ident: Mat2 = (1, 0, 0, 1)
    tau2 = mat_mul(TAU_MAT, TAU_MAT)
    out = []
    for x, gx in enumerate(P.lifts):
        for mats in ([S_MAT], [TAU_MAT, tau2]):
            rel: GroupRing = [(1, ident, x)]
            for m in mats:
                gam, y = P.transition(mat_mul(gx, m))
                rel.append((1, gam, y))
            out.append(rel)
    return out


# the symbol ---------------------------------------------------------------

@dataclass
class OverconvergentSymbol:
    """``Φ(g_x D0) = p^{-shift}·X[x]`` as truncated moment vectors at level ``N``."""

    N: int
    p: int
    k: int
    M: int
    shift: int
    X: list[list[int]]
    alpha: PadicNumber
    coherence: int = 0
    iterations: int = 0
    distances: list[int] = field(default_factory=list)
    ledger: dict = field(default_factory=dict)

    @property
    def g(self) -> int:
        return self.k - 2

    @property
    def P(self) -> P1List:
        return p1list(self.N)

    def distribution(self, x: int) -> ApproxDistribution:
        return ApproxDistribution(self.p, self.k, self.M, self.X[x], self.shift)

    def evaluate(self, s, r) -> ApproxDistribution:
        """``Φ({s} - {r})``."""
        terms = self.P.divisor_terms(s, r)
        acc = _combine(terms, self.X, self.p, self.g, self.M, self.shift)
        return ApproxDistribution(self.p, self.k, self.M, acc, self.shift)

    def with_values(self, X, **kw) -> "OverconvergentSymbol":
        d = dict(N=self.N, p=self.p, k=self.k, M=self.M, shift=self.shift, X=X, alpha=self.alpha,
                 coherence=self.coherence, iterations=self.iterations, distances=list(self.distances),
                 ledger=dict(self.ledger))
        d.update(kw)
        return OverconvergentSymbol(**d)

    def dump(self) -> str:
        """Text dump: a header line and one line of little-endian digit lists per generator."""
        p = self.p
        lines = [f"N={self.N} p={self.p} k={self.k} M={self.M} shift={self.shift} coherence={self.coherence}"]
        for x, vec in enumerate(self.X):
            parts = []
            for j, v in enumerate(vec):
                nd = self.M - j + self.shift
                parts.append("".join(str(d) if d < 10 else f"({d})" for d in _digits(v, p, nd)))
            lines.append(f"{x}\t" + " ".join(parts))
        return "\n".join(lines) + "\n"

    @classmethod
    def parse_dump(cls, text: str, alpha: PadicNumber) -> "OverconvergentSymbol":
        lines = text.strip("\n").split("\n")
        hdr = dict(kv.split("=") for kv in lines[0].split())
        N, p, k, M, shift = (int(hdr[x]) for x in ("N", "p", "k", "M", "shift"))
        X = []
        for line in lines[1:]:
            _, rest = line.split("\t")
            vec = []
            for tok in rest.split(" "):
                digs = _parse_digits(tok)
                vec.append(sum(d * p**i for i, d in enumerate(digs)))
            X.append(vec)
        return cls(N, p, k, M, shift, X, alpha, coherence=int(hdr["coherence"]))


def _digits(v: int, p: int, n: int) -> list[int]:
    out = []
    for _ in range(max(n, 0)):
        out.append(v % p)
        v //= p
    return out


def _parse_digits(tok: str) -> list[int]:
    out, i = [], 0
    while i < len(tok):
        if tok[i] == "(":
            j = tok.index(")", i)
            out.append(int(tok[i + 1:j]))
            i = j + 1
        else:
            out.append(int(tok[i]))
            i += 1
    return out


def _reduce(vec: list[int], p: int, M: int, shift: int) -> list[int]:
    return [x % p ** (M - j + shift) if M - j + shift > 0 else 0 for j, x in enumerate(vec)]


def _combine(terms, X, p, g, M, shift) -> list[int]:
    acc = [0] * M
    W = M + shift
    for gam, y, c in terms:
        T = moment_matrix(gam, p, g, M, W)
        v = X[y]
        for j in range(M):
            row = T[j]
            s = 0
            for i in range(M):
                if row[i] and v[i]:
                    s += row[i] * v[i]
            acc[j] += c * s
    return _reduce(acc, p, M, shift)


def apply_terms(terms: Terms, X: list[list[int]], p: int, g: int, M: int, shift: int) -> list[list[int]]:
    return [_combine(row, X, p, g, M, shift) for row in terms]


@lru_cache(maxsize=None)
def _up_terms(N: int, p: int) -> Terms:
    return hecke_terms(p1list(N), up_deltas(p))


@lru_cache(maxsize=None)
def _tl_terms(N: int, l: int) -> Terms:
    return hecke_terms(p1list(N), tl_deltas(l))


def up_on_symbol(phi: OverconvergentSymbol) -> OverconvergentSymbol:
    """``U_p Φ`` (not divided by α)."""
    Y = apply_terms(_up_terms(phi.N, phi.p), phi.X, phi.p, phi.g, phi.M, phi.shift)
    return phi.with_values(Y)


def hecke_on_symbol(phi: OverconvergentSymbol, l: int) -> OverconvergentSymbol:
    if (phi.N * phi.p) % l == 0:
        raise ValueError("T_l needs l prime to Np")
    Y = apply_terms(_tl_terms(phi.N, l), phi.X, phi.p, phi.g, phi.M, phi.shift)
    return phi.with_values(Y)


def fil_distance(A: list[list[int]], B: list[list[int]], p: int, M: int, shift: int) -> int:
    """Largest ``M' ≤ M`` with ``A ≡ B`` modulo the level-``M'`` filtration (``M`` when equal)."""
    best = M
    for a, b in zip(A, B):
        for j, (x, y) in enumerate(zip(a, b)):
            d = (x - y) % p ** (M - j + shift) if M - j + shift > 0 else 0
            if d:
                best = min(best, valuation(d, p) - shift + j)
    return best


def relation_precision(phi: OverconvergentSymbol) -> int:
    """Filtration level to which all Manin relations hold."""
    best = phi.M
    zero = [[0] * phi.M]
    for rel in relation_list(phi.N):
        terms = [(g, y, c) for c, g, y in rel]
        res = _combine(terms, phi.X, phi.p, phi.g, phi.M, phi.shift)
        best = min(best, fil_distance([res], zero, phi.p, phi.M, phi.shift))
    return best


def eigen_precision(phi: OverconvergentSymbol) -> int:
    U = up_on_symbol(phi).X
    aX = _scale(phi.X, phi.alpha, phi.p, phi.M, phi.shift)
    return fil_distance(U, aX, phi.p, phi.M, phi.shift)


def _scale(X, a: PadicNumber, p, M, shift):
    """Multiply by ``a`` (requires ``a`` integral)."""
    if a.v < 0:
        raise ValueError("scalar must be integral")
    W = M + shift
    ai = a.residue(W) if not a.is_zero() else 0
    return [_reduce([ai * x for x in v], p, M, shift) for v in X]


# lifting ----------------------------------------------------------------

def hecke_root(a_p, p: int, k: int, prec: int) -> PadicNumber:
    """The root of ``X^2 - a_p X + p^{k-1}`` of smaller slope, to ``prec`` digits."""
    a = Fraction(a_p)
    if a.denominator != 1:
        raise ValueError("a_p must be an integer")
    a = int(a)
    q = p ** (k - 1)
    if a == 0 or 2 * valuation(a, p) >= k - 1:
        raise CriticalSlopeError("the two roots have equal slope; no preferred refinement in Q_p")
    h = valuation(a, p)
    W = prec + 2 * k + h + 4
    mod = p**W
    # α = a - q/α, iterated from α = a (contracting since v(q/α^2) > 0)
    x = a % mod
    for _ in range(W + 2):
        u = x // p**h
        inv = pow(u, -1, mod)
        x = (a - (q // p**h) * inv) % mod
    return PadicNumber.from_int_abs(p, x, prec + h)


def alpha_for(stab: StabilizedSymbol, prec: int) -> PadicNumber:
    """The U_p-eigenvalue of ``φ_α``: ``a_p`` when ``p | N``, else the smaller-slope Hecke root."""
    if stab.c1 is None:
        a = stab.a_p
        return padic_from_rational(a.numerator, a.denominator, stab.p, prec)
    return hecke_root(stab.a_p, stab.p, stab.k, prec)


def _padic_to_scaled(v: PadicNumber, shift: int, prec: int) -> int:
    """Integer ``X`` with ``v = p^{-shift} X`` modulo ``p^{prec}`` (in ``X`` units)."""
    if v.is_zero():
        return 0
    e = v.v + shift
    if e < 0:
        raise PrecisionError("value has a larger denominator than the shift allows")
    return (v.u * v.p**e) % v.p**prec


def _classical_values(stab: StabilizedSymbol, alpha: PadicNumber, prec: int):
    return stab.padic_values(alpha, prec)


def _solve_mod(A: list[list[int]], b: list[int], p: int, K: int, free_values) -> tuple[list[PadicNumber], int]:
    """Solve ``A x = b`` over ``Z_p`` modulo ``p^K`` by valuation pivoting.

    Returns p-adic solutions (free columns set from ``free_values``) and the
    largest valuation of a residual in the inconsistent rows (``K`` if none).
    """
    mod = p**K
    rows = [list(r) + [bb] for r, bb in zip(A, b)]
    nr, nc = len(rows), len(A[0]) if A else 0
    piv_cols: list[int] = []
    piv_vals: list[int] = []
    r = 0
    cols_left = list(range(nc))
    while r < nr and cols_left:
        best = None
        for i in range(r, nr):
            row = rows[i]
            for c in cols_left:
                x = row[c] % mod
                if x:
                    v = valuation(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, c)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, c = best
        rows[r], rows[i] = rows[i], rows[r]
        prow = rows[r]
        u = (prow[c] % mod) // p**v
        uinv = pow(u, -1, mod)
        prow[:] = [(x * uinv) % mod for x in prow]
        for i2 in range(r + 1, nr):
            x = rows[i2][c] % mod
            if x:
                f = x // p**v
                ri = rows[i2]
                for cc in range(nc + 1):
                    if prow[cc]:
                        ri[cc] = (ri[cc] - f * prow[cc]) % mod
        piv_cols.append(c)
        piv_vals.append(v)
        cols_left.remove(c)
        r += 1
    worst = K
    for i in range(r, nr):
        x = rows[i][nc] % mod
        if x:
            worst = min(worst, valuation(x, p))
    sol: list[PadicNumber | None] = [None] * nc
    for c in cols_left:
        sol[c] = PadicNumber.from_int_abs(p, free_values(c), K)
    for rr in range(r - 1, -1, -1):
        row = rows[rr]
        c = piv_cols[rr]
        acc = PadicNumber.from_int_abs(p, row[nc], K)
        for cc in range(nc):
            if cc != c and row[cc] % mod:
                acc = acc - sol[cc] * PadicNumber.from_int_abs(p, row[cc], K)
        sol[c] = acc / PadicNumber(p, piv_vals[rr], 1, K)
    return sol, worst


def initial_lift(stab: StabilizedSymbol, alpha: PadicNumber, M: int, choice: int = 0):
    """An approximate distribution-valued lift satisfying the Manin relations.

    Low moments come from ``φ_α``; the higher moments of the free generators
    solve the leftover relations, with any undetermined directions filled
    from a generator seeded by ``choice`` (0 means zeros).
    """
    p, k = stab.p, stab.k
    g = k - 2
    N = stab.N
    pres = presentation(N)
    base = _classical_values(stab, alpha, M + 2 * k + 8)
    vmin = min([x.v for row in base for x in row if not x.is_zero()] + [0])
    shift0 = max(0, -vmin)
    K = M + shift0 + 4
    fidx = {f: i for i, f in enumerate(pres.free)}
    nf = len(pres.free)
    hi = M - g - 1
    W = M + shift0
    # unknown (f, j) for j > g
    ucol = {(f, j): fidx[f] * hi + (j - g - 1) for f in pres.free for j in range(g + 1, M)}
    known = {f: [_padic_to_scaled(base[f][j], shift0, W) for j in range(g + 1)] for f in pres.free}
    A, b = [], []
    for rel in pres.leftover:
        coef = [[0] * (nf * hi) for _ in range(M)]
        rhs = [0] * M
        for c, gam, f in rel:
            T = moment_matrix(gam, p, g, M, K)
            for j in range(M):
                row = T[j]
                for i in range(M):
                    if not row[i]:
                        continue
                    if i <= g:
                        rhs[j] -= c * row[i] * known[f][i]
                    else:
                        coef[j][ucol[(f, i)]] += c * row[i]
        for j in range(M):
            # row j only matters modulo p^{M-j}: scale by p^j
            A.append([x * p**j for x in coef[j]])
            b.append(rhs[j] * p**j)
    rng = random.Random(choice)
    free_val = (lambda c: 0) if choice == 0 else (lambda c: rng.randrange(p ** (M + shift0)))
    if A and nf * hi:
        sol, worst = _solve_mod(A, b, p, K, free_val)
    else:
        sol, worst = [], K
        for row_b in b:
            if row_b % p**K:
                worst = min(worst, valuation(row_b % p**K, p))
    if worst < M + shift0:
        raise LiftError(f"leftover relations inconsistent at filtration level {worst - shift0}")
    svals = [x.v for x in sol if x is not None and not x.is_zero()]
    shift = max([shift0] + [-v for v in svals])
    Wf = M + shift
    free_X = {}
    for f in pres.free:
        vec = [_padic_to_scaled(base[f][j], shift, Wf) for j in range(g + 1)]
        for j in range(g + 1, M):
            x = sol[ucol[(f, j)]] if sol else None
            vec.append(0 if x is None else _padic_to_scaled(x, shift, Wf))
        free_X[f] = vec
    X = []
    for x in range(len(pres.expr)):
        terms = [(gam, f, c) for c, gam, f in pres.expr[x]]
        # free generators live at their own index in free_X
        acc = [0] * M
        for gam, f, c in terms:
            T = moment_matrix(gam, p, g, M, Wf)
            v = free_X[f]
            for j in range(M):
                acc[j] += c * sum(T[j][i] * v[i] for i in range(M) if T[j][i] and v[i])
        X.append(_reduce(acc, p, M, shift))
    return X, shift


def lift(stab: StabilizedSymbol, alpha: PadicNumber, M: int, iters: int | None = None,
         choice: int = 0) -> OverconvergentSymbol:
    """The unique U_p-eigensymbol with eigenvalue ``α`` specialising to ``φ_α``."""
    p, k = stab.p, stab.k
    g = k - 2
    h = alpha.v
    if h >= k - 1:
        raise CriticalSlopeError(f"slope {h} is not below k-1 = {k - 1}")
    if M < k - 1:
        raise PrecisionError("need at least k-1 moments")
    iters = 2 * M + 10 if iters is None else iters
    X, shift = initial_lift(stab, alpha, M, choice)
    N = stab.N
    base = _classical_values(stab, alpha, M + 2 * k + 8)
    terms = _up_terms(N, p)
    distances: list[int] = []
    it = 0
    while True:
        W = M + shift
        low = [[_padic_to_scaled(base[x][j], shift, W) for j in range(g + 1)] for x in range(len(X))]
        Y = apply_terms(terms, X, p, g, M, shift + h)
        # divide by α = p^h u
        u_inv = pow(alpha.u, -1, p ** (W + h))
        bad = False
        newX = []
        for x, vec in enumerate(Y):
            out = list(low[x])
            for j in range(g + 1, M):
                y = vec[j] % p ** (M - j + shift + h)
                if y % p**h:
                    bad = True
                    break
                out.append((y // p**h) * u_inv)
            if bad:
                break
            newX.append(_reduce(out, p, M, shift))
        if bad:
            X = [[v * p for v in vec] for vec in X]
            shift += 1
            continue
        d = fil_distance(newX, X, p, M, shift)
        distances.append(d)
        X = newX
        it += 1
        if d >= M:
            break
        if it >= iters:
            raise DivergenceError(f"no convergence after {iters} iterations; distances {distances}")
    phi = OverconvergentSymbol(N, p, k, M, shift, X, alpha, iterations=it, distances=distances)
    rel = relation_precision(phi)
    eig = eigen_precision(phi)
    phi.coherence = min(M, rel, eig)
    phi.ledger = {"relations": rel, "eigen": eig, "shift": shift, "slope": h,
                  "alpha_precision": alpha.absprec}
    return phi


def specialization_matches(phi: OverconvergentSymbol, stab: StabilizedSymbol) -> bool:
    """Low moments agree with an independent evaluation of ``φ_α`` on every generator."""
    g = phi.g
    vals = stab.padic_values(phi.alpha, phi.M + phi.shift + 8)
    for x in range(len(phi.X)):
        d = phi.distribution(x)
        for j in range(g + 1):
            if d.moment(j) != vals[x][j].add_bigoh(phi.M - j):
                return False
    return True


def agreement_precision(a: OverconvergentSymbol, b: OverconvergentSymbol) -> int:
    s = max(a.shift, b.shift)
    A = [[x * a.p ** (s - a.shift) for x in v] for v in a.X]
    B = [[x * b.p ** (s - b.shift) for x in v] for v in b.X]
    return fil_distance(A, B, a.p, min(a.M, b.M), s)


# admissibility --------------------------------------------------------------

def measure_piece(phi: OverconvergentSymbol, a: int, n: int) -> ApproxDistribution:
    """``Φ({∞} - {-a/p^n})`` pushed forward by ``z ↦ p^n z + a`` (not yet divided by ``α^n``)."""
    p = phi.p
    D = phi.evaluate(INF, (-a, p**n))
    from .dist import act

    return act((p**n, a, 0, 1), D)


def admissibility_profile(phi: OverconvergentSymbol, nmax: int = 4) -> dict:
    """Norms ``max_{a,j≤⌊h⌋} p^{nj} |∫_{a+p^n}(x-a)^j dμ|`` and their fitted growth exponent."""
    import math

    p = phi.p
    h = phi.alpha.v
    norms = []
    for n in range(1, nmax + 1):
        best = None
        for a in range(p**n):
            if a % p == 0:
                continue
            D = phi.evaluate(INF, (-a, p**n))
            # ∫_{a+p^n}(x-a)^j dμ = α^{-n} Φ(D)((p^n z)^j) = α^{-n} p^{nj} D_j
            for j in range(int(math.floor(h)) + 1):
                m = D.moment(j)
                if m.is_zero():
                    continue
                v = m.v + n * j - n * h  # valuation of α^{-n} p^{nj} D_j
                v_norm = v - n * j  # times p^{nj}
                best = v_norm if best is None else min(best, v_norm)
        norms.append(best)
    # ‖·‖_n = p^{-v}; growth exponent = slope of log_p ‖·‖_n = -v_n
    pts = [(n + 1, -v) for n, v in enumerate(norms) if v is not None]
    if len(pts) >= 2:
        xs, ys = zip(*pts)
        mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
        num = sum((x - mx) * (y - my) for x, y in pts)
        den = sum((x - mx) ** 2 for x in xs)
        slope = num / den
    else:
        slope = 0.0
    return {"h": h, "valuations": norms,
            "norms": [0.0 if v is None else float(p) ** (-v) for v in norms],
            "exponent": slope}
