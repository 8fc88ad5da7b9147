"""Dense exact linear algebra over ``Fraction``."""

from __future__ import annotations

from fractions import Fraction

Matrix = list[list[Fraction]]


def rref(rows: Matrix, ncols: int) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns.

    Pivots are taken among the first ``ncols`` columns; any trailing columns
    are carried along by the row operations.
    """
    A = [list(r) for r in rows if any(r)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(A)):
            if A[i][c]:
                piv = i
                break
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / Fraction(A[r][c])
        A[r] = [x * inv for x in A[r]]
        row = A[r]
        nz = [j for j in range(c, len(row)) if row[j]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                Ai = A[i]
                for j in nz:
                    Ai[j] -= f * row[j]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def nullspace(rows: Matrix, ncols: int) -> Matrix:
    """Basis (as row vectors) of ``{x : rows @ x = 0}``."""
    R, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(piv):
            v[c] = -R[i][f]
        basis.append(v)
    return basis


def rank(rows: Matrix, ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def matvec(A: Matrix, v: list) -> list:
    return [sum((a * x for a, x in zip(row, v) if a), Fraction(0)) for row in A]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    Bt = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col) if a and b), Fraction(0)) for col in Bt] for row in A]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def coordinates(basis: Matrix, v: list) -> list[Fraction]:
    """Coordinates of ``v`` in the span of ``basis`` rows; raises if ``v`` is outside."""
    n = len(basis)
    if n == 0:
        if any(v):
            raise ValueError("vector not in span")
        return []
    m = len(v)
    # solve sum_i c_i basis[i] = v via rref of the augmented transpose
    rows = [[basis[i][j] for i in range(n)] + [v[j]] for j in range(m)]
    R, piv = rref(rows, n + 1)
    if n in piv:
        raise ValueError("vector not in span")
    c = [Fraction(0)] * n
    for i, col in enumerate(piv):
        c[col] = R[i][n]
    return c


class SpanSolver:
    """Repeated coordinate extraction against a fixed basis."""

    def __init__(self, basis: Matrix):
        self.n = len(basis)
        self.m = len(basis[0]) if basis else 0
        # rref of the basis rows with a tracking identity block
        aug = [list(b) + [Fraction(int(i == j)) for j in range(self.n)] for i, b in enumerate(basis)]
        R, piv = rref(aug, self.m)
        if len(piv) != self.n:
            raise ValueError("basis is not independent")
        self.R = R
        self.piv = piv

    def __call__(self, v: list) -> list[Fraction]:
        c = [Fraction(0)] * self.n
        resid = list(v)
        for row, col in zip(self.R, self.piv):
            f = resid[col]
            if f:
                for j in range(self.m):
                    if row[j]:
                        resid[j] -= f * row[j]
                tail = row[self.m:]
                for j in range(self.n):
                    if tail[j]:
                        c[j] += f * tail[j]
        if any(resid):
            raise ValueError("vector not in span")
        return c


def charpoly(A: Matrix) -> list[Fraction]:
    """Coefficients ``[c_0, ..., c_n]`` of ``det(x I - A)`` (Faddeev–LeVerrier)."""
    n = len(A)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        Mk = matmul(A, Mk)
        for i in range(n):
            Mk[i][i] += coeffs[n - k + 1]
        AM = matmul(A, Mk)
        coeffs[n - k] = -sum(AM[i][i] for i in range(n)) / k
    return coeffs


def poly_of_matrix(coeffs: list[Fraction], A: Matrix) -> Matrix:
    n = len(A)
    out = [[Fraction(0)] * n for _ in range(n)]
    for c in reversed(coeffs):
        out = matmul(out, A)
        for i in range(n):
            out[i][i] += c
    return out
