"""Formal linearization: b_j = a_j/(1 - lambda^{m_j}) and the transversal elimination along x = 0."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import BadInput, LazyLevel, ResonantDivisor
from ..numerics.ball import BallComplex, BallReal
from ..numerics.ops import lam_pow, lam_pow_minus_one_rel
from ..rotations.angle import RotationNumber
from .series import CremerMapSpec, SeriesValue, apply_F, coerce_point, eval_a


def linearize_coeff(spec: CremerMapSpec, j: int) -> BallComplex:
    """b_j = a_j / (1 - lambda^{m_j}); |b_j| = (2j)^{m_j} exactly."""
    lv = spec.level(j)
    if lv.lazy:
        raise LazyLevel(f"level {j} is lazy")
    return BallComplex(lv.coeff, BallReal(0, 0, spec.prec)) / (-lv.mu_minus_one)


def divergence_profile(spec: CremerMapSpec, J: int | None = None) -> list:
    """[(j, |b_j|^{1/m_j})]; each value is 2j, so the root test gives radius 0."""
    mat = [lv for lv in spec.levels() if not lv.lazy]
    J = len(mat) if J is None else J
    if J > len(mat):
        raise LazyLevel(f"only {len(mat)} levels are materialized")
    out = []
    for lv in mat[:J]:
        b = abs(linearize_coeff(spec, lv.j))
        out.append((lv.j, (b.log() / lv.m).exp()))
    return out


def coefficient_identity(spec: CremerMapSpec, j: int) -> bool:
    """b_j - lambda^{m_j} b_j overlaps a_j."""
    lv = spec.level(j)
    b = linearize_coeff(spec, j)
    lhs = b * (-lv.mu_minus_one)
    return lhs.overlaps(BallComplex(lv.coeff, BallReal(0, 0, spec.prec)))


def _b_sum(spec, x, J):
    tot = BallComplex(0, 0, spec.prec)
    for lv in spec.levels()[:J]:
        if lv.lazy:
            raise LazyLevel(f"level {lv.j} is lazy")
        tot = tot + linearize_coeff(spec, lv.j) * x[spec.index(lv.j)] ** lv.m
    return tot


def first_integral_residual(spec: CremerMapSpec, J: int, x, y=0) -> SeriesValue:
    """(y + b_{<=J}(x)) o F - (y + b_{<=J}(x)) by direct composition.

    ``partial`` is the composition through the materialized part of a; the levels
    left out of both a's partial sum and b_{<=J} are carried in ``tail``.
    """
    x = coerce_point(spec, x)
    yb = y if isinstance(y, BallComplex) else BallComplex.from_complex(complex(y), spec.prec)
    av = eval_a(spec, x)
    fx = [spec.lam * v for v in x]
    phi0 = yb + _b_sum(spec, x, J)
    phi1 = (yb + av.partial) + _b_sum(spec, fx, J)
    extra = BallComplex(0, 0, spec.prec)
    for lv in spec.levels()[J:]:
        if not lv.lazy:
            extra = extra + x[spec.index(lv.j)] ** lv.m * lv.coeff
    return SeriesValue(phi1 - phi0 - extra, av.tail)


def first_integral_direct(spec: CremerMapSpec, J: int, x, y=0) -> BallComplex:
    """Same quantity through apply_F (so the tail enters as ball radius)."""
    x = coerce_point(spec, x)
    x1, y1 = apply_F(spec, (x, y))
    yb = y if isinstance(y, BallComplex) else BallComplex.from_complex(complex(y), spec.prec)
    return (y1 + _b_sum(spec, x1, J)) - (yb + _b_sum(spec, x, J))


def contrast_profile(theta: RotationNumber, ms, prec: int = 128) -> list:
    """|c_j / (1 - lambda^{m_j})|^{1/m_j} for the M-free coefficients c_j = 2^{-m_j}.

    Bounded (about 1/2) for a Bruno angle; grows with M_j for a Cremer angle.
    """
    out = []
    for m in ms:
        d = abs(lam_pow_minus_one_rel(theta, m, prec))
        out.append((m, (-(d.log() / m)).exp() / 2))
    return out


# ---------------------------------------------------------------------------------------------
# transversal linearization on jets truncated by total degree


class Jet:
    """Polynomial in (x, y) modulo the monomials of total degree > T."""

    __slots__ = ("c", "T")

    def __init__(self, c, T: int):
        self.T = T
        self.c = np.asarray(c, dtype=np.complex128)
        self.c[_mask(T) == 0] = 0

    @classmethod
    def zero(cls, T):
        return cls(np.zeros((T + 1, T + 1)), T)

    @classmethod
    def monomial(cls, i, l, T, coef=1.0):
        z = np.zeros((T + 1, T + 1), dtype=np.complex128)
        if i + l <= T:
            z[i, l] = coef
        return cls(z, T)

    def __add__(self, o):
        return Jet(self.c + o.c, self.T)

    def __sub__(self, o):
        return Jet(self.c - o.c, self.T)

    def scale(self, s):
        return Jet(self.c * s, self.T)

    def __mul__(self, o):
        T = self.T
        out = np.zeros((T + 1, T + 1), dtype=np.complex128)
        for i, l in zip(*np.nonzero(self.c)):
            out[i:, l:] += self.c[i, l] * o.c[: T + 1 - i, : T + 1 - l]
        return Jet(out, T)

    def x_coeff(self, i: int) -> np.ndarray:
        """Coefficient of x^i as a polynomial in y (array indexed by y-degree)."""
        return self.c[i].copy()

    def compose(self, g1: "Jet", g2: "Jet") -> "Jet":
        """self(g1, g2); g1 and g2 must vanish at the origin."""
        T = self.T
        if abs(g1.c[0, 0]) or abs(g2.c[0, 0]):
            raise BadInput("substituted series must vanish at the origin")
        p1 = [Jet.monomial(0, 0, T)]
        p2 = [Jet.monomial(0, 0, T)]
        for _ in range(T):
            p1.append(p1[-1] * g1)
            p2.append(p2[-1] * g2)
        out = Jet.zero(T)
        for i, l in zip(*np.nonzero(self.c)):
            out = out + (p1[i] * p2[l]).scale(self.c[i, l])
        return out


def _mask(T):
    i = np.arange(T + 1)
    return (i[:, None] + i[None, :] <= T).astype(np.int8)


def _y_poly(coeffs, T) -> Jet:
    z = np.zeros((T + 1, T + 1), dtype=np.complex128)
    z[0, : len(coeffs)] = coeffs[: T + 1]
    return Jet(z, T)


class JetMap:
    __slots__ = ("f1", "f2")

    def __init__(self, f1: Jet, f2: Jet):
        self.f1, self.f2 = f1, f2

    @property
    def T(self):
        return self.f1.T

    def then(self, outer: "JetMap") -> "JetMap":
        """outer o self."""
        return JetMap(outer.f1.compose(self.f1, self.f2), outer.f2.compose(self.f1, self.f2))

    @classmethod
    def identity(cls, T):
        return cls(Jet.monomial(1, 0, T), Jet.monomial(0, 1, T))


def _g2(d, j, T, sign=1.0) -> JetMap:
    """(x, y + sign d(y) x^j)."""
    return JetMap(Jet.monomial(1, 0, T), Jet.monomial(0, 1, T) + (_y_poly(d, T) * Jet.monomial(j, 0, T)).scale(sign))


def _g1(c, j1, T, sign=1.0) -> JetMap:
    """(x + sign c(y) x^{j1}, y)."""
    return JetMap(Jet.monomial(1, 0, T) + (_y_poly(c, T) * Jet.monomial(j1, 0, T)).scale(sign), Jet.monomial(0, 1, T))


def _inverse_g2(d, j, T) -> JetMap:
    # Y = y - d(Y) x^j, iterated to a fixed point in the (x, y)-adic topology
    x = Jet.monomial(1, 0, T)
    y = Jet.monomial(0, 1, T)
    Y = y
    dj = _y_poly(d, T)
    xj = Jet.monomial(j, 0, T)
    for _ in range(T + 1):
        Y = y - dj.compose(x, Y) * xj
    return JetMap(x, Y)


def _inverse_g1(c, j1, T) -> JetMap:
    x = Jet.monomial(1, 0, T)
    y = Jet.monomial(0, 1, T)
    X = x
    cj = _y_poly(c, T)
    for _ in range(T + 1):
        X = x - cj * _pow(X, j1)
    return JetMap(X, y)


def _pow(J: Jet, k: int) -> Jet:
    out = Jet.monomial(0, 0, J.T)
    for _ in range(k):
        out = out * J
    return out


@dataclass
class TransversalResult:
    lam: complex
    N: int
    y_trunc: int
    total_degree: int
    c: dict  # j -> y-coefficients of c_j, j = 2..N
    d: dict  # j -> y-coefficients of d_j, j = 1..N
    residual: float  # max |coefficient| of H^{-1} F H - (lambda x, y) in x-degree <= N
    divisors: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def cl(a):
            return [[repr(float(z.real)), repr(float(z.imag))] for z in a]

        return {
            "N": self.N, "y_trunc": self.y_trunc, "total_degree": self.total_degree,
            "c": {str(j): cl(v) for j, v in self.c.items()},
            "d": {str(j): cl(v) for j, v in self.d.items()},
            "residual": repr(self.residual),
        }


def _jet_from_dict(terms: dict, T: int) -> Jet:
    z = np.zeros((T + 1, T + 1), dtype=np.complex128)
    for (i, l), v in terms.items():
        if i + l <= T:
            z[i, l] += complex(v)
    return Jet(z, T)


def _check_divisor(theta, lam, e1, e0, prec):
    """Ball for lambda^{e1} - lambda^{e0}; ResonantDivisor if it may vanish."""
    if theta is not None:
        b = lam_pow_minus_one_rel(theta, e1 - e0, prec) * lam_pow(theta, e0, prec)
    else:
        L = BallComplex.from_complex(lam, prec)
        b = L ** e1 - L ** e0
    if b.contains_zero():
        raise ResonantDivisor(f"|lambda^{e1} - lambda^{e0}| is not separated from 0")
    return b


def transversal_linearization(F1: dict, F2: dict, lam=None, N: int = 6, y_trunc: int = 6,
                              theta: RotationNumber | None = None, prec: int = 128) -> TransversalResult:
    """Alternating eliminations G_{2,j}, G_{1,j+1} conjugating F to (lambda x, y) modulo x^{N+1}.

    F1, F2 map (i, l) -> coefficient of x^i y^l.  F must fix {x = 0} pointwise
    with x-linear part lambda x.  Jets are truncated at total degree N + y_trunc,
    which every elimination step preserves, so the y-coefficients of c_j, d_j are
    exact up to degree N + y_trunc - j.
    """
    if N < 1:
        raise BadInput("N must be >= 1")
    if theta is not None:
        lam = complex(lam_pow(theta, 1, 64))
    if lam is None:
        lam = complex(F1.get((1, 0), 0))
    lam = complex(lam)
    T = N + y_trunc
    f1, f2 = _jet_from_dict(F1, T), _jet_from_dict(F2, T)
    tol = 1e-12 * max(1.0, float(np.abs(f1.c).max()), float(np.abs(f2.c).max()))
    if np.abs(f1.c[0]).max() > tol or np.abs(f2.c[0] - np.eye(1, T + 1, 1)[0]).max() > tol:
        raise BadInput("F must fix the line x = 0 pointwise")
    if abs(f1.c[1, 0] - lam) > tol or np.abs(f1.c[1, 1:]).max() > tol:
        raise BadInput("the x-linear part of F must be lambda x with lambda constant")
    cur = JetMap(f1, f2)
    cs, ds, divs = {}, {}, {}
    H = JetMap.identity(T)
    for j in range(1, N + 1):
        divs[f"lambda^{j}-1"] = _check_divisor(theta, lam, j, 0, prec)
        beta = cur.f2.x_coeff(j)
        d = beta / (lam ** j - 1)
        ds[j] = d[: T - j + 1]
        g = _g2(d, j, T)
        cur = g.then(cur).then(_inverse_g2(d, j, T))
        H = g.then(H)
        if j == N:
            break
        divs[f"lambda^{j + 1}-lambda"] = _check_divisor(theta, lam, j + 1, 1, prec)
        alpha = cur.f1.x_coeff(j + 1)
        c = alpha / (lam ** (j + 1) - lam)
        cs[j + 1] = c[: T - j]
        g = _g1(c, j + 1, T)
        cur = g.then(cur).then(_inverse_g1(c, j + 1, T))
        H = g.then(H)
    # independent check: rebuild H^{-1} o F o H from the original F
    Hinv = JetMap.identity(T)
    for j in range(N, 0, -1):
        if j + 1 in cs:
            Hinv = _inverse_g1(cs[j + 1], j + 1, T).then(Hinv)
        Hinv = _inverse_g2(ds[j], j, T).then(Hinv)
    conj = H.then(JetMap(f1, f2)).then(Hinv)
    target1 = Jet.monomial(1, 0, T, lam)
    target2 = Jet.monomial(0, 1, T)
    r1 = (conj.f1 - target1).c[: N + 1]
    r2 = (conj.f2 - target2).c[: N + 1]
    residual = float(max(np.abs(r1).max(), np.abs(r2).max()))
    return TransversalResult(lam, N, y_trunc, T, cs, ds, residual, divs)
