"""Truncated moment models of locally analytic distributions on Z_p.

A distribution ``μ`` is stored through its moments ``μ_j = μ(z^j)`` for
``0 ≤ j < M``, as integers ``X_j`` with ``μ_j = p^{-shift} X_j``.  Moment
``j`` is significant modulo ``p^{M-j}`` (the standard filtration), so
``X_j`` is kept modulo ``p^{M-j+shift}``.

The semigroup ``Λ_p = {[a,b;c,d] : p | c, p ∤ d, ad - bc ≠ 0}`` acts by
``(γ·μ)(f) = μ(f|γ)`` with ``(f|γ)(z) = (cz+d)^{k-2} f((az+b)/(cz+d))``.
No determinant twist is applied (see ``act``).
"""

from __future__ import annotations

import os
import pickle
from functools import lru_cache
from math import comb

from .padic import PadicDomainError, PadicNumber, PrecisionError

Mat2 = tuple[int, int, int, int]


class SemigroupError(ValueError):
    """Matrix outside the semigroup Λ_p."""


def in_semigroup(gam: Mat2, p: int) -> bool:
    a, b, c, d = gam
    return c % p == 0 and d % p != 0 and a * d - b * c != 0


def _gen_binom(e: int, n: int) -> int:
    """``C(e, n)`` for any integer ``e``."""
    if e >= 0:
        return comb(e, n)
    return (-1) ** n * comb(n - e - 1, n)


@lru_cache(maxsize=200_000)
def _moment_matrix(a: int, b: int, c: int, d: int, p: int, g: int, M: int, W: int) -> tuple[tuple[int, ...], ...]:
    mod = p**W
    dinv = pow(d, -1, mod)
    r = c * dinv % mod
    rows = []
    for j in range(M):
        e = g - j
        # (az+b)^j
        left = [comb(j, i) * pow(a, i, mod) * pow(b, j - i, mod) % mod for i in range(min(j, M - 1) + 1)]
        # (cz+d)^e = d^e (1 + r z)^e, truncated below z^M
        de = pow(d, e, mod) if e >= 0 else pow(dinv, -e, mod)
        nmax = min(e, M - 1) if e >= 0 else M - 1
        right = [_gen_binom(e, n) * pow(r, n, mod) * de % mod for n in range(nmax + 1)]
        out = [0] * M
        for i, x in enumerate(left):
            if x:
                for n, y in enumerate(right):
                    if i + n >= M:
                        break
                    out[i + n] = (out[i + n] + x * y) % mod
        rows.append(tuple(out))
    return tuple(rows)


_DISK: dict | None = None


def _disk_cache() -> dict:
    global _DISK
    if _DISK is None:
        _DISK = {}
        path = _cache_path()
        if path and os.path.exists(path):
            try:
                with open(path, "rb") as fh:
                    _DISK = pickle.load(fh)
            except (OSError, pickle.PickleError, EOFError):
                _DISK = {}
    return _DISK


def _cache_path() -> str | None:
    root = os.environ.get("PADIC_LFUN_CACHE")
    return os.path.join(root, "moment_matrices.pkl") if root else None


def save_cache() -> None:
    """Persist the transition matrices computed so far when ``PADIC_LFUN_CACHE`` is set."""
    path = _cache_path()
    if not path:
        return
    cache = _disk_cache()
    info = _moment_matrix.cache_info()
    if not info.currsize and not cache:
        return
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "wb") as fh:
        pickle.dump(cache, fh)


def moment_matrix(gam: Mat2, p: int, g: int, M: int, W: int) -> tuple[tuple[int, ...], ...]:
    """``T[j][i]`` with ``(γμ)_j = Σ_i T[j][i] μ_i`` modulo ``p^W``."""
    if not in_semigroup(gam, p):
        raise SemigroupError(f"{gam} is not in Λ_{p}")
    mod = p**W
    key = (gam[0] % mod, gam[1] % mod, gam[2] % mod, gam[3] % mod, p, g, M, W)
    if _cache_path():
        cache = _disk_cache()
        hit = cache.get(key)
        if hit is None:
            hit = cache[key] = _moment_matrix(*key)
        return hit
    return _moment_matrix(*key)


class ApproxDistribution:
    """Moments ``μ_j = p^{-shift} X_j`` with ``μ_j`` known modulo ``p^{M-j}``."""

    __slots__ = ("p", "k", "M", "X", "shift")

    def __init__(self, p: int, k: int, M: int, X: list[int], shift: int = 0):
        if k % 2:
            raise ValueError("odd weight")
        if len(X) != M:
            raise ValueError("need exactly M moments")
        self.p, self.k, self.M, self.shift = p, k, M, shift
        self.X = [x % p ** (M - j + shift) if M - j + shift > 0 else 0 for j, x in enumerate(X)]

    @classmethod
    def from_moments(cls, p: int, k: int, moments: list, M: int | None = None) -> "ApproxDistribution":
        """Build from PadicNumber (or integer/Fraction) moments."""
        from fractions import Fraction

        M = len(moments) if M is None else M
        vals = []
        for m in moments[:M]:
            if isinstance(m, PadicNumber):
                vals.append(m)
            else:
                f = Fraction(m)
                from .padic import padic_from_rational

                vals.append(padic_from_rational(f.numerator, f.denominator, p, M + 8))
        shift = max([0] + [-v.v for v in vals if not v.is_zero()])
        X = []
        for j, v in enumerate(vals):
            need = M - j
            if not v.is_zero() and v.absprec < need:
                raise PrecisionError(f"moment {j} known only to p^{v.absprec}")
            if v.is_zero():
                X.append(0)
            else:
                X.append(v.u * p ** (v.v + shift))
        return cls(p, k, M, X, shift)

    @classmethod
    def dirac(cls, p: int, k: int, M: int, a: int) -> "ApproxDistribution":
        return cls(p, k, M, [a**j for j in range(M)])

    @classmethod
    def zero(cls, p: int, k: int, M: int) -> "ApproxDistribution":
        return cls(p, k, M, [0] * M)

    def moment(self, j: int) -> PadicNumber:
        return PadicNumber.from_scaled(self.p, self.X[j], self.shift, self.M - j)

    def moments(self) -> list[PadicNumber]:
        return [self.moment(j) for j in range(self.M)]

    def is_zero(self) -> bool:
        return not any(self.X)

    def with_shift(self, shift: int) -> "ApproxDistribution":
        if shift < self.shift:
            raise ValueError("can only increase the shift")
        f = self.p ** (shift - self.shift)
        return ApproxDistribution(self.p, self.k, self.M, [x * f for x in self.X], shift)

    def truncate(self, M: int) -> "ApproxDistribution":
        if M > self.M:
            raise PrecisionError("cannot extend moments")
        return ApproxDistribution(self.p, self.k, M, self.X[:M], self.shift)

    def __eq__(self, other):
        if not isinstance(other, ApproxDistribution):
            return NotImplemented
        if (self.p, self.k) != (other.p, other.k):
            return False
        M = min(self.M, other.M)
        s = max(self.shift, other.shift)
        a, b = self.truncate(M).with_shift(s), other.truncate(M).with_shift(s)
        return a.X == b.X

    __hash__ = None

    def __add__(self, other: "ApproxDistribution") -> "ApproxDistribution":
        M = min(self.M, other.M)
        s = max(self.shift, other.shift)
        a, b = self.truncate(M).with_shift(s), other.truncate(M).with_shift(s)
        return ApproxDistribution(self.p, self.k, M, [x + y for x, y in zip(a.X, b.X)], s)

    def __sub__(self, other: "ApproxDistribution") -> "ApproxDistribution":
        M = min(self.M, other.M)
        s = max(self.shift, other.shift)
        a, b = self.truncate(M).with_shift(s), other.truncate(M).with_shift(s)
        return ApproxDistribution(self.p, self.k, M, [x - y for x, y in zip(a.X, b.X)], s)

    def __repr__(self):
        return f"ApproxDistribution(p={self.p}, k={self.k}, M={self.M}, shift={self.shift}, X={self.X})"


def act(gam: Mat2, mu: ApproxDistribution) -> ApproxDistribution:
    """``(γμ)(z^j) = μ((az+b)^j (cz+d)^{k-2-j})`` truncated to the filtration.

    The determinant twist ``det(γ)^{-(k-2)/2}`` is deliberately omitted so
    that ``U_p`` built from ``[p, b; 0, 1]`` has the classical integral
    eigenvalue and specialisation is equivariant for all of ``Λ_p``.
    """
    p, M, s = mu.p, mu.M, mu.shift
    T = moment_matrix(gam, p, mu.k - 2, M, M + s)
    out = [sum(t * x for t, x in zip(row, mu.X)) for row in T]
    return ApproxDistribution(p, mu.k, M, out, s)


def act_unit_scaling(u: int | PadicNumber, mu: ApproxDistribution) -> ApproxDistribution:
    """Action of ``diag(u, 1)`` for a unit ``u``: ``μ'_j = u^j μ_j``."""
    p, M = mu.p, mu.M
    if isinstance(u, PadicNumber):
        if u.is_zero() or u.v != 0:
            raise PadicDomainError("not a unit")
        if u.absprec < M + mu.shift:
            raise PrecisionError("unit known to too few digits")
        u = u.u
    if u % p == 0:
        raise PadicDomainError("not a unit")
    mod = p ** (M + mu.shift)
    return ApproxDistribution(p, mu.k, M, [pow(u, j, mod) * x for j, x in enumerate(mu.X)], mu.shift)


def specialize(mu: ApproxDistribution) -> list[PadicNumber]:
    """The functional ``P ↦ μ(P)`` on polynomials of degree ``≤ k-2``, as moments."""
    g = mu.k - 2
    if mu.M < g + 1:
        raise PrecisionError("too few moments to specialise")
    return [mu.moment(j) for j in range(g + 1)]


def poly_dual_action(gam: Mat2, values: list, g: int) -> list:
    """Action on a functional on degree-``≤ g`` polynomials given by its moments."""
    a, b, c, d = gam
    out = []
    for j in range(g + 1):
        coeffs = [0] * (g + 1)
        for i in range(j + 1):
            x = comb(j, i) * a**i * b ** (j - i)
            for n in range(g - j + 1):
                coeffs[i + n] += x * comb(g - j, n) * c**n * d ** (g - j - n)
        acc = None
        for cf, v in zip(coeffs, values):
            if cf:
                t = v * cf
                acc = t if acc is None else acc + t
        out.append(acc if acc is not None else values[0] * 0)
    return out
