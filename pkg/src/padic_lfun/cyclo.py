"""Characters of (Z/p^c)^× with values in p-power cyclotomic extensions of Q_p.

Every character is written as ``ω^t · ψ`` where ``ω`` is the Teichmüller
character and ``ψ`` has p-power order.  The canonical generator ``g`` of
``(Z/p^c)^×`` is the smallest positive primitive root modulo ``p**2``
(which is a primitive root modulo every ``p**c``), and the power-basis
generator ``ζ`` of the level-``m`` ring is declared to be
``exp(2πi/p^m)``; ``ψ(g) = ζ_{p^m}^w``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .padic import PadicNumber, PrecisionError, teichmuller_int

__all__ = [
    "CycloElement",
    "DirichletChar",
    "enumerate_chars",
    "gauss_sum",
    "parse_char",
    "primitive_root",
    "trivial_char",
]


def _phi(p: int, m: int) -> int:
    return 1 if m == 0 else (p - 1) * p ** (m - 1)


class CycloElement:
    """Element of ``Z_p[ζ_{p^m}]`` (or its fraction field) in the power basis.

    ``coeffs[i]`` is the coefficient of ``ζ**i`` for ``0 <= i < φ(p**m)``.
    """

    __slots__ = ("p", "m", "coeffs")

    def __init__(self, p: int, m: int, coeffs: list[PadicNumber]):
        n = _phi(p, m)
        if len(coeffs) != n:
            raise ValueError(f"level {m} needs {n} coefficients")
        self.p = p
        self.m = m
        self.coeffs = list(coeffs)

    @classmethod
    def scalar(cls, x: PadicNumber, m: int = 0) -> "CycloElement":
        n = _phi(x.p, m)
        z = PadicNumber.zero(x.p, x.absprec)
        return cls(x.p, m, [x] + [z] * (n - 1))

    @classmethod
    def zeta_power(cls, p: int, m: int, e: int, prec: int, coeff: PadicNumber | None = None) -> "CycloElement":
        """``coeff * ζ_{p^m}**e`` reduced into the power basis."""
        one = coeff if coeff is not None else PadicNumber(p, 0, 1, prec)
        poly = {e % p**m if m else 0: one}
        return cls(p, m, _reduce(p, m, poly, one.absprec if one.u else prec))

    @property
    def precision(self) -> int:
        return min(c.absprec for c in self.coeffs)

    def valuation(self) -> int:
        """Smallest coefficient valuation (``absprec`` when everything vanishes)."""
        vals = [c.v for c in self.coeffs if not c.is_zero()]
        return min(vals) if vals else self.precision

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def embed(self, m2: int) -> "CycloElement":
        if m2 < self.m:
            raise ValueError("can only embed upwards")
        if m2 == self.m:
            return self
        p = self.p
        step = p ** (m2 - self.m) if self.m else 0
        prec = self.precision
        out = [PadicNumber.zero(p, prec)] * _phi(p, m2)
        for i, c in enumerate(self.coeffs):
            out[i * step] = c
        return CycloElement(p, m2, out)

    def _lift(self, other):
        if isinstance(other, CycloElement):
            m = max(self.m, other.m)
            return self.embed(m), other.embed(m)
        if isinstance(other, (PadicNumber, int)):
            if isinstance(other, int):
                other = PadicNumber.from_int_abs(self.p, other, self.precision + 64)
            return self, CycloElement.scalar(other, self.m)
        return None

    def __add__(self, other):
        pair = self._lift(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycloElement(a.p, a.m, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloElement(self.p, self.m, [-c for c in self.coeffs])

    def __sub__(self, other):
        pair = self._lift(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycloElement(a.p, a.m, [x - y for x, y in zip(a.coeffs, b.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (PadicNumber, int)):
            return CycloElement(self.p, self.m, [c * other for c in self.coeffs])
        if not isinstance(other, CycloElement):
            return NotImplemented
        a, b = self._lift(other)
        p, m = a.p, a.m
        va, xa, na = a._scaled()
        vb, xb, nb = b._scaled()
        prec = min(na + vb, nb + va)
        prod = [0] * (len(xa) + len(xb) - 1)
        for i, x in enumerate(xa):
            if x:
                for j, y in enumerate(xb):
                    prod[i + j] += x * y
        red = _reduce_ints(p, m, prod)
        return CycloElement(p, m, [PadicNumber.from_scaled(p, c, -(va + vb), prec) for c in red])

    def _scaled(self) -> tuple[int, list[int], int]:
        """``(v, ints, absprec)`` with ``self = p**v * ints`` to absolute precision ``absprec``."""
        p = self.p
        prec = self.precision
        nz = [c.v for c in self.coeffs if not c.is_zero()]
        v = min(nz) if nz else prec
        out = []
        for c in self.coeffs:
            if c.is_zero():
                out.append(0)
            else:
                out.append(c.u * p ** (c.v - v))
        return v, out, prec

    __rmul__ = __mul__

    def galois(self, c: int) -> "CycloElement":
        """Apply ``ζ ↦ ζ**c`` for ``c`` prime to ``p``."""
        p, m = self.p, self.m
        if m == 0:
            return self
        poly: dict[int, PadicNumber] = {}
        for i, x in enumerate(self.coeffs):
            e = (i * c) % p**m
            poly[e] = poly[e] + x if e in poly else x
        return CycloElement(p, m, _reduce(p, m, poly, self.precision))

    def trace_to(self, m0: int) -> "CycloElement":
        """Relative trace down to level ``m0``."""
        p, m = self.p, self.m
        if m0 > m:
            raise ValueError("target level above source")
        if m0 == m:
            return self
        if m0 == 0:
            conj = [c for c in range(1, p**m) if c % p]
        else:
            conj = [1 + t * p**m0 for t in range(p ** (m - m0))]
        total = None
        for c in conj:
            g = self.galois(c)
            total = g if total is None else total + g
        step = p ** (m - m0)
        prec = total.precision
        out = []
        for i in range(_phi(p, m0)):
            out.append(total.coeffs[i * step] if m0 else total.coeffs[0])
        for i, c in enumerate(total.coeffs):
            if (m0 == 0 and i != 0) or (m0 and i % step):
                if not c.is_zero():
                    raise PrecisionError("trace did not land in the subfield")
        return CycloElement(p, m0, [x.add_bigoh(prec) for x in out])

    def add_bigoh(self, absprec: int) -> "CycloElement":
        return CycloElement(self.p, self.m, [c.add_bigoh(absprec) for c in self.coeffs])

    def __eq__(self, other):
        pair = self._lift(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return (a - b).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"CycloElement(p={self.p}, m={self.m}, coeffs={[str(c) for c in self.coeffs]})"


def _reduce_ints(p: int, m: int, poly: list[int]) -> list[int]:
    n = _phi(p, m)
    if m == 0:
        return [sum(poly)]
    order = p**m
    block = p ** (m - 1)
    work = [0] * order
    for e, x in enumerate(poly):
        work[e % order] += x
    for d in range(order - 1, n - 1, -1):
        x = work[d]
        if x:
            base = d - n
            for i in range(p - 1):
                work[base + i * block] -= x
    return work[:n]


def _reduce(p: int, m: int, poly: dict[int, PadicNumber], prec: int) -> list[PadicNumber]:
    n = _phi(p, m)
    if m == 0:
        acc = PadicNumber.zero(p, prec)
        for x in poly.values():
            acc = acc + x
        return [acc]
    order = p**m
    block = p ** (m - 1)
    work: dict[int, PadicNumber] = {}
    for e, x in poly.items():
        e %= order
        work[e] = work[e] + x if e in work else x
    # ζ^d = -(ζ^{d-n} + ζ^{d-n+block} + ... ) for d >= n
    for d in range(order - 1, n - 1, -1):
        x = work.pop(d, None)
        if x is None:
            continue
        base = d - n
        for i in range(p - 1):
            e = base + i * block
            work[e] = work[e] - x if e in work else -x
    out = []
    for i in range(n):
        out.append(work[i] if i in work else PadicNumber.zero(p, prec))
    return out


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Smallest positive primitive root modulo ``p**2`` (odd ``p``)."""
    order = p * (p - 1)
    mod = p * p
    fac = _prime_factors(order)
    for g in range(2, mod):
        if g % p == 0:
            continue
        if all(pow(g, order // q, mod) != 1 for q in fac):
            return g
    raise ValueError("no primitive root")


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def _dlog_table(p: int, c: int) -> dict[int, int]:
    g = primitive_root(p)
    mod = p**c
    table, x = {}, 1
    for i in range(_phi(p, c)):
        table[x] = i
        x = x * g % mod
    return table


def dlog(a: int, p: int, c: int) -> int:
    """Index of ``a`` with respect to the canonical generator modulo ``p**c``."""
    return _dlog_table(p, c)[a % p**c]


@dataclass(frozen=True)
class DirichletChar:
    """``χ = ω^t · ψ`` with ``ψ(g) = ζ_{p^m}^w`` (``w`` a unit mod ``p^m`` or ``m = 0``)."""

    p: int
    t: int
    m: int = 0
    w: int = 0

    def __post_init__(self):
        p = self.p
        if p == 2:
            raise ValueError("p = 2 is not supported for characters")
        object.__setattr__(self, "t", self.t % (p - 1))
        if self.m:
            w = self.w % p**self.m
            if w % p == 0:
                raise ValueError("w must be a unit so that ψ has order p^m")
            object.__setattr__(self, "w", w)
        else:
            object.__setattr__(self, "w", 0)

    @property
    def conductor_exponent(self) -> int:
        if self.m:
            return self.m + 1
        return 1 if self.t else 0

    @property
    def conductor(self) -> int:
        return self.p**self.conductor_exponent

    @property
    def order(self) -> int:
        p = self.p
        ot = (p - 1) // gcd(p - 1, self.t) if self.t else 1
        return ot * p**self.m

    @property
    def parity(self) -> int:
        return -1 if self.t % 2 else 1

    @property
    def level(self) -> int:
        """Cyclotomic level holding the values."""
        return self.m

    def is_trivial(self) -> bool:
        return self.t == 0 and self.m == 0

    def conj(self) -> "DirichletChar":
        return DirichletChar(self.p, -self.t, self.m, -self.w if self.m else 0)

    def __mul__(self, other: "DirichletChar") -> "DirichletChar":
        p = self.p
        m = max(self.m, other.m)
        w = self.w * p ** (m - self.m) if self.m else 0
        w += other.w * p ** (m - other.m) if other.m else 0
        w %= p**m if m else 1
        while m and w % p == 0:
            w //= p
            m -= 1
        return DirichletChar(p, self.t + other.t, m, w)

    def exponents(self, a: int) -> tuple[int, int] | None:
        """``(ω-part index, ζ exponent)`` such that ``χ(a) = ω(a)^t ζ^e``; ``None`` if ``p | a``."""
        if a % self.p == 0:
            return None
        if not self.m:
            return (self.t, 0)
        c = self.m + 1
        return (self.t, (self.w * dlog(a, self.p, c)) % self.p**self.m)

    def value(self, a: int, prec: int) -> CycloElement | None:
        """``χ(a)`` as a level-``m`` cyclotomic element, or ``None`` when ``p | a``."""
        ex = self.exponents(a)
        if ex is None:
            return None
        p = self.p
        om = PadicNumber(p, 0, pow(teichmuller_int(a, p, prec), self.t, p**prec), prec)
        if not self.m:
            return CycloElement.scalar(om)
        return CycloElement.zeta_power(p, self.m, ex[1], prec, om)

    def value_at_minus_one(self) -> int:
        return self.parity

    def label(self) -> str:
        return f"chi{{p={self.p},t={self.t},m={self.m},w={self.w}}}"

    def __str__(self):
        return self.label()


def trivial_char(p: int) -> DirichletChar:
    return DirichletChar(p, 0)


def enumerate_chars(p: int, c: int) -> list[DirichletChar]:
    """All ``φ(p**c)`` characters of ``(Z/p**c)^×``, ordered by conductor then ``(t, w)``."""
    if p == 2:
        raise ValueError("p = 2 is not supported")
    if c < 0:
        raise ValueError("negative exponent")
    if c == 0:
        return [trivial_char(p)]
    out = []
    for m in range(c):
        ws = [w for w in range(p**m) if w % p] if m else [0]
        for t in range(p - 1):
            for w in ws:
                out.append(DirichletChar(p, t, m, w))
    out.sort(key=lambda x: (x.conductor_exponent, x.m, x.t, x.w))
    return out


def gauss_sum(chi: DirichletChar, M: int) -> CycloElement:
    """``τ(χ) = Σ_a χ(a) ζ_{p^f}^a`` over units ``a`` mod the conductor ``p^f``; ``1`` if unramified."""
    p = chi.p
    f = chi.conductor_exponent
    if M < 1:
        raise PrecisionError("precision must be positive")
    if f == 0:
        return CycloElement.scalar(PadicNumber(p, 0, 1, M))
    mod = p**M
    poly = [0] * p**f
    # χ-values live at level m = f-1 (or 0); ζ_{p^m} = ζ_{p^f}^{p^{f-m}}
    shift = p ** (f - chi.m) if chi.m else 0
    for a in range(1, p**f):
        if a % p == 0:
            continue
        t, e = chi.exponents(a)
        om = pow(teichmuller_int(a, p, M), t, mod)
        poly[(e * shift + a) % p**f] += om
    red = _reduce_ints(p, f, poly)
    total = CycloElement(p, f, [PadicNumber.from_int_abs(p, c, M) for c in red])
    if total.is_zero():
        raise PrecisionError("Gauss sum vanished at this precision")
    return total


_CHAR_RE = re.compile(r"\s*chi\s*\{([^}]*)\}\s*")


def parse_char(text: str, p: int | None = None) -> DirichletChar:
    """Parse ``chi{p=5,t=1,m=0,w=0}`` or ``chi{p=5,c=1,ord=2[,idx=0]}`` or ``trivial``."""
    if text.strip() in ("trivial", "1"):
        if p is None:
            raise ValueError("trivial character needs a prime")
        return trivial_char(p)
    mt = _CHAR_RE.fullmatch(text)
    if not mt:
        raise ValueError(f"bad character literal {text!r}")
    fields = {}
    for part in mt.group(1).split(","):
        if not part.strip():
            continue
        k, _, v = part.partition("=")
        fields[k.strip()] = int(v)
    q = fields.pop("p", p)
    if q is None:
        raise ValueError("character literal needs p=")
    if "t" in fields or "w" in fields:
        return DirichletChar(q, fields.get("t", 0), fields.get("m", 0), fields.get("w", 0))
    c = fields.get("c", 0)
    order = fields.get("ord", 1)
    idx = fields.get("idx", 0)
    cands = [x for x in enumerate_chars(q, c) if x.conductor_exponent == c and x.order == order]
    if idx >= len(cands):
        raise ValueError(f"no character with conductor {q}^{c} and order {order} at index {idx}")
    return cands[idx]
