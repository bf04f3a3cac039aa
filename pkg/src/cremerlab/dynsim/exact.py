"""Exact Gaussian rationals p + q i (p, q in Q) and small exact matrix routines."""

from __future__ import annotations

from fractions import Fraction
from numbers import Complex, Rational


class GaussRat:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def of(cls, z) -> "GaussRat":
        """Exact value of an int, Fraction, float (a dyadic) or complex."""
        if isinstance(z, GaussRat):
            return z
        if isinstance(z, Rational):
            return cls(z, 0)
        if isinstance(z, float):
            return cls(Fraction(z), 0)
        if isinstance(z, Complex):
            z = complex(z)
            return cls(Fraction(z.real), Fraction(z.imag))
        raise TypeError(f"cannot take {type(z).__name__} exactly")

    def __add__(self, o):
        o = GaussRat.of(o)
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-GaussRat.of(o))

    def __rsub__(self, o):
        return GaussRat.of(o) - self

    def __mul__(self, o):
        o = GaussRat.of(o)
        return GaussRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = GaussRat.of(o)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by exact zero")
        return self * GaussRat(o.re / n, -o.im / n)

    def __eq__(self, o):
        try:
            o = GaussRat.of(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussRat({self.re}, {self.im})"


def mat_exact(M) -> list:
    return [[GaussRat.of(v) for v in row] for row in M]


def mat_mul(A, B) -> list:
    n, k, m = len(A), len(B), len(B[0])
    return [[sum((A[i][t] * B[t][j] for t in range(k)), GaussRat()) for j in range(m)] for i in range(n)]


def mat_eye(n) -> list:
    return [[GaussRat(1 if i == j else 0) for j in range(n)] for i in range(n)]


def mat_pow(A, e: int) -> list:
    R = mat_eye(len(A))
    while e:
        if e & 1:
            R = mat_mul(R, A)
        e >>= 1
        if e:
            A = mat_mul(A, A)
    return R


def mat_sub(A, B) -> list:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def is_zero(A) -> bool:
    return all(not v for row in A for v in row)


def det(A) -> GaussRat:
    """Determinant by Gaussian elimination over Q(i)."""
    A = [list(r) for r in A]
    n = len(A)
    d = GaussRat(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c]), None)
        if piv is None:
            return GaussRat(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            d = -d
        d = d * A[c][c]
        inv = GaussRat(1) / A[c][c]
        for r in range(c + 1, n):
            if A[r][c]:
                f = A[r][c] * inv
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return d


def charpoly(A) -> list:
    """Coefficients [c_0, ..., c_n] of det(t I - A) (monic), Faddeev-LeVerrier over Q(i)."""
    n = len(A)
    coeffs = [GaussRat(0)] * (n + 1)
    coeffs[n] = GaussRat(1)
    M = [[GaussRat(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        M = mat_mul(A, M)
        M = [[M[i][j] + (coeffs[n - k + 1] if i == j else 0) for j in range(n)] for i in range(n)]
        AM = mat_mul(A, M)
        tr = sum((AM[i][i] for i in range(n)), GaussRat())
        coeffs[n - k] = tr * Fraction(-1, k)
    return coeffs
