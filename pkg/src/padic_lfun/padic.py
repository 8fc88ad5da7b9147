"""Fixed-precision p-adic numbers with relative precision.

A nonzero :class:`PadicNumber` stores ``p**v * u`` where ``u`` is a unit known
modulo ``p**M``.  The zero element carries only an absolute precision: it
means "0 + O(p**v)".
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd

__all__ = [
    "PadicNumber",
    "PadicPowerSeries",
    "PadicDomainError",
    "PrecisionError",
    "valuation",
    "padic_from_rational",
    "teichmuller",
    "teichmuller_int",
    "iwasawa_log",
    "log_unit",
    "padic_power_series",
]


class PadicDomainError(ValueError):
    """Input outside the domain of a p-adic function."""


class PrecisionError(ArithmeticError):
    """Not enough p-adic precision to produce a meaningful answer."""


def valuation(n: int, p: int) -> int:
    """Valuation of a nonzero integer; raises on zero."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _val_or(n: int, p: int, default: int) -> int:
    return default if n == 0 else valuation(n, p)


class PadicNumber:
    __slots__ = ("p", "v", "u", "M")

    def __init__(self, p: int, v: int, u: int, M: int):
        # trusted constructor; callers normalise
        self.p = p
        self.v = v
        self.u = u
        self.M = M

    # construction -----------------------------------------------------

    @classmethod
    def zero(cls, p: int, absprec: int) -> "PadicNumber":
        return cls(p, absprec, 0, 0)

    @classmethod
    def from_int_abs(cls, p: int, n: int, absprec: int) -> "PadicNumber":
        """``n + O(p**absprec)``."""
        if absprec <= 0:
            return cls.zero(p, absprec)
        n %= p**absprec
        if n == 0:
            return cls.zero(p, absprec)
        v = valuation(n, p)
        M = absprec - v
        return cls(p, v, (n // p**v) % p**M, M)

    @classmethod
    def from_scaled(cls, p: int, n: int, shift: int, absprec: int) -> "PadicNumber":
        """``p**(-shift) * n`` known to absolute precision ``absprec``."""
        base = cls.from_int_abs(p, n, absprec + shift)
        if base.u == 0:
            return cls.zero(p, absprec)
        return cls(p, base.v - shift, base.u, base.M)

    # basic accessors --------------------------------------------------

    def is_zero(self) -> bool:
        return self.u == 0

    @property
    def absprec(self) -> int:
        return self.v + self.M

    def valuation(self) -> int:
        return self.v

    def unit_part(self) -> int:
        return self.u

    def to_fraction(self) -> Fraction:
        """Rational lift ``p**v * u`` (with ``0 <= u < p**M``)."""
        if self.v >= 0:
            return Fraction(self.u * self.p**self.v)
        return Fraction(self.u, self.p ** (-self.v))

    def residue(self, n: int) -> int:
        """Integer representative modulo ``p**n``; needs ``v >= 0`` and ``absprec >= n``."""
        if self.absprec < n:
            raise PrecisionError(f"need absolute precision {n}, have {self.absprec}")
        if self.u == 0:
            return 0
        if self.v < 0:
            raise PadicDomainError("not integral")
        return (self.u * self.p**self.v) % self.p**n

    def digits(self) -> list[int]:
        out = []
        u = self.u
        for _ in range(self.M):
            out.append(u % self.p)
            u //= self.p
        return out

    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValueError("mismatched primes")
            return other
        if isinstance(other, int):
            return PadicNumber.from_int_abs(self.p, other, self.absprec + _val_or(other, self.p, 0) + max(self.M, 1) + 64)
        if isinstance(other, Fraction):
            return padic_from_rational(other.numerator, other.denominator, self.p, max(self.M, 1) + 64)
        return NotImplemented

    # arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.p
        N = min(self.absprec, other.absprec)
        if self.u == 0 and other.u == 0:
            return PadicNumber.zero(p, N)
        vm = min(self.v if self.u else N, other.v if other.u else N)
        X = 0
        if self.u:
            X += self.u * p ** (self.v - vm)
        if other.u:
            X += other.u * p ** (other.v - vm)
        return PadicNumber.from_scaled(p, X, -vm, N) if vm >= 0 else _from_neg(p, X, vm, N)

    __radd__ = __add__

    def __neg__(self):
        if self.u == 0:
            return self
        return PadicNumber(self.p, self.v, (-self.u) % self.p**self.M, self.M)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.p
        if self.u == 0 and other.u == 0:
            return PadicNumber.zero(p, self.v + other.v)
        if self.u == 0:
            return PadicNumber.zero(p, self.v + other.v)
        if other.u == 0:
            return PadicNumber.zero(p, self.v + other.v)
        M = min(self.M, other.M)
        return PadicNumber(p, self.v + other.v, (self.u * other.u) % p**M, M)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.u == 0:
            raise ZeroDivisionError("p-adic zero is not invertible")
        return PadicNumber(self.p, -self.v, pow(self.u, -1, self.p**self.M), self.M)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return PadicNumber(self.p, 0, 1, max(self.M, 1) if self.u else self.absprec)
        if self.u == 0:
            return PadicNumber.zero(self.p, self.v * n)
        return PadicNumber(self.p, self.v * n, pow(self.u, n, self.p**self.M), self.M)

    def add_bigoh(self, absprec: int) -> "PadicNumber":
        """Reduce to absolute precision ``absprec`` (never increases precision)."""
        if absprec >= self.absprec:
            return self
        if self.u == 0 or absprec <= self.v:
            return PadicNumber.zero(self.p, absprec)
        M = absprec - self.v
        return PadicNumber(self.p, self.v, self.u % self.p**M, M)

    def lift_to_precision(self, absprec: int) -> "PadicNumber":
        """Same representative, claimed to absolute precision ``absprec``."""
        if self.u == 0:
            return PadicNumber.zero(self.p, absprec)
        return PadicNumber(self.p, self.v, self.u, absprec - self.v)

    # comparison -------------------------------------------------------

    def __eq__(self, other):
        """Equality up to the joint absolute precision."""
        try:
            other = self._coerce(other)
        except ValueError:
            return False
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def identical(self, other: "PadicNumber") -> bool:
        """Bit-exact equality of the stored representation."""
        return (self.p, self.v, self.u, self.M) == (other.p, other.v, other.u, other.M)

    # text -------------------------------------------------------------

    def __str__(self):
        if self.u == 0:
            return f"{self.p}^{self.v} * [] + O({self.p}^({self.v}))"
        d = ", ".join(str(x) for x in self.digits())
        return f"{self.p}^{self.v} * [{d}] + O({self.p}^({self.absprec}))"

    def __repr__(self):
        return f"PadicNumber({self})"

    @classmethod
    def parse(cls, text: str) -> "PadicNumber":
        m = re.fullmatch(
            r"\s*(\d+)\^(-?\d+)\s*\*\s*\[([^\]]*)\]\s*\+\s*O\(\s*(\d+)\^\((-?\d+)\)\s*\)\s*",
            text,
        )
        if not m:
            raise ValueError(f"cannot parse p-adic literal: {text!r}")
        p, v = int(m.group(1)), int(m.group(2))
        body = m.group(3).strip()
        digits = [int(x) for x in body.split(",")] if body else []
        if int(m.group(4)) != p:
            raise ValueError("prime mismatch in O-term")
        absprec = int(m.group(5))
        if not digits:
            return cls.zero(p, absprec)
        if absprec - v != len(digits):
            raise ValueError("digit count does not match precision")
        u = sum(d * p**i for i, d in enumerate(digits))
        if u % p == 0:
            raise ValueError("unit part must be a unit")
        return cls(p, v, u, len(digits))


def _from_neg(p: int, X: int, vm: int, N: int) -> PadicNumber:
    # value p**vm * X with vm < 0, known to absolute precision N
    if X % p ** (N - vm) == 0:
        return PadicNumber.zero(p, N)
    X %= p ** (N - vm)
    w = valuation(X, p)
    M = N - vm - w
    return PadicNumber(p, vm + w, (X // p**w) % p**M, M)


def padic_from_rational(a: int, b: int, p: int, M: int) -> PadicNumber:
    """``a/b`` to ``M`` significant digits (zero gets absolute precision ``M``)."""
    if b == 0:
        raise ZeroDivisionError("denominator is zero")
    if a == 0:
        return PadicNumber.zero(p, M)
    g = gcd(a, b)
    a //= g
    b //= g
    va = valuation(a, p)
    vb = valuation(b, p)
    a //= p**va
    b //= p**vb
    mod = p**M
    return PadicNumber(p, va - vb, (a * pow(b, -1, mod)) % mod, M)


def teichmuller_int(a: int, p: int, N: int) -> int:
    """Integer representative of the Teichmüller lift of ``a`` modulo ``p**N``."""
    if a % p == 0:
        raise PadicDomainError(f"{a} is not a unit at {p}")
    mod = p**N
    if p == 2:
        return 1 if a % 4 == 1 else mod - 1
    x = a % mod
    for _ in range(N + 1):
        y = pow(x, p, mod)
        if y == x:
            break
        x = y
    return x


def teichmuller(a: int, p: int, M: int) -> PadicNumber:
    """Teichmüller representative of ``a`` (for ``p = 2``: the sign ``±1`` mod 4)."""
    if gcd(a, p) != 1:
        raise PadicDomainError(f"{a} is not coprime to {p}")
    return PadicNumber(p, 0, teichmuller_int(a, p, M), M)


def _log_one_plus(t: PadicNumber) -> PadicNumber:
    p = t.p
    if t.u == 0:
        return PadicNumber.zero(p, t.absprec)
    vt = t.v
    target = t.absprec
    total = PadicNumber.zero(p, target)
    power = t
    n = 1
    while True:
        # every later term has valuation >= n*vt - log_p(n) >= target
        if n * vt - _maxval_upto(n, p) >= target and n > 1:
            break
        term = power / n
        total = total + (term if n % 2 else -term)
        n += 1
        power = power * t
    return total


def _maxval_upto(n: int, p: int) -> int:
    # largest v_p(m) for m >= n in the next stretch; log bound is enough
    k = 0
    while p ** (k + 1) <= n * p:
        k += 1
    return k


def iwasawa_log(x: PadicNumber) -> PadicNumber:
    """``log(x)`` for ``x ≡ 1 (mod p)`` (``mod 4`` when ``p = 2``)."""
    p = x.p
    if x.u == 0 or x.v != 0:
        raise PadicDomainError("logarithm needs a unit")
    m = 4 if p == 2 else p
    need = 2 if p == 2 else 1
    if x.M < need or x.u % m != 1:
        raise PadicDomainError("logarithm series needs x = 1 mod p")
    return _log_one_plus(x - 1)


def log_unit(x: PadicNumber) -> PadicNumber:
    """Iwasawa logarithm on all of ``Q_p^×``: ``log(p) = 0`` and roots of unity die."""
    if x.u == 0:
        raise PadicDomainError("log of zero")
    p = x.p
    u = PadicNumber(p, 0, x.u, x.M)
    w = teichmuller(x.u % p if p != 2 else x.u % 4, p, x.M)
    return iwasawa_log(u / w)


class PadicPowerSeries:
    """Truncated expansion ``sum c_j (s - center)**j`` with p-adic coefficients.

    Coefficients may be :class:`PadicNumber` or any ring element supporting
    ``+`` and ``*`` with them (cyclotomic values, for instance).
    """

    def __init__(self, p: int, center, coeffs: list):
        self.p = p
        self.center = center
        self.coeffs = list(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, s):
        h = s - self.center
        if not isinstance(h, PadicNumber):
            h = _as_padic(h, self.p, _coeff_prec(self.coeffs) + 8)
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * h + c
        return acc

    def _check(self, other):
        if self.p != other.p or self.center != other.center:
            raise ValueError("series centred at different points")

    def __add__(self, other):
        self._check(other)
        D = min(self.degree, other.degree)
        return PadicPowerSeries(self.p, self.center, [self.coeffs[i] + other.coeffs[i] for i in range(D + 1)])

    def __mul__(self, other):
        if not isinstance(other, PadicPowerSeries):
            return PadicPowerSeries(self.p, self.center, [c * other for c in self.coeffs])
        self._check(other)
        D = min(self.degree, other.degree)
        out = []
        for n in range(D + 1):
            acc = self.coeffs[0] * other.coeffs[n]
            for i in range(1, n + 1):
                acc = acc + self.coeffs[i] * other.coeffs[n - i]
            out.append(acc)
        return PadicPowerSeries(self.p, self.center, out)

    def __repr__(self):
        return f"PadicPowerSeries(p={self.p}, center={self.center}, coeffs={self.coeffs})"


def _coeff_prec(coeffs) -> int:
    best = 0
    for c in coeffs:
        if isinstance(c, PadicNumber):
            best = max(best, c.absprec)
    return max(best, 1)


def _as_padic(x, p: int, M: int) -> PadicNumber:
    if isinstance(x, PadicNumber):
        return x
    x = Fraction(x)
    return padic_from_rational(x.numerator, x.denominator, p, M)


def padic_power_series(x: PadicNumber, r: int, D: int, M: int) -> PadicPowerSeries:
    """Expansion of ``<x>**(s-1)`` in powers of ``(s - r)`` up to degree ``D``.

    ``<x>`` is ``x`` divided by its Teichmüller representative; the
    coefficients are ``<x>**(r-1) * log<x>**j / j!``.
    """
    p = x.p
    if x.u == 0 or x.v != 0:
        raise PadicDomainError("<x> is only defined on units here")
    x = x.add_bigoh(M)
    w = teichmuller(x.u % (4 if p == 2 else p), p, x.M)
    ang = x / w
    lg = iwasawa_log(ang)
    base = ang ** (r - 1)
    coeffs = []
    term = base
    for j in range(D + 1):
        if j:
            term = term * lg / j
        coeffs.append(term)
    return PadicPowerSeries(p, r, coeffs)
