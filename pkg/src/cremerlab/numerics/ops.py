"""Operations that combine balls with exact integer data."""

from __future__ import annotations

from numbers import Integral

from gmpy2 import mpq

from ..errors import BadInput, LazyExponent, PrecisionExhausted
from .ball import BallComplex, BallReal
from .logscale import BigCount, as_count

MIN_PREC = 32


def pow_int(z: BallComplex, k, prec: int = 128) -> BallComplex:
    """Enclosure of z^k by binary powering with 2*bitlen(k) guard bits."""
    if prec < MIN_PREC:
        raise BadInput(f"precision must be at least {MIN_PREC} bits")
    k = as_count(k)
    if not k.materialized:
        raise LazyExponent("pow_int needs a materialized exponent")
    n = k.value
    work = prec + 2 * max(n.bit_length(), 1)
    base = z.with_prec(work) if isinstance(z, BallComplex) else BallComplex.from_complex(z, work)
    result = BallComplex(1, 0, work)
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def circle(t: BallReal) -> BallComplex:
    """Enclosure of e^{2 pi i t}."""
    if isinstance(t, Integral) or not isinstance(t, BallReal):
        t = BallReal(t)
    if t.is_exact():
        # exact quarter turns give exact results
        q = mpq(t.mid) * 4
        if q.denominator == 1:
            r = int(q) % 4
            return BallComplex(*[(1, 0), (0, 1), (-1, 0), (0, -1)][r], prec=t.prec)
    ang = BallReal.pi(t.prec + 8) * t * 2
    return BallComplex(ang.cos(), ang.sin())


def circle_minus_one(t: BallReal) -> BallComplex:
    """e^{2 pi i t} - 1 = -2 sin^2(pi t) + i sin(2 pi t), without cancellation near t = 0."""
    if not isinstance(t, BallReal):
        t = BallReal(t)
    s = (BallReal.pi(t.prec + 8) * t).sin()
    s2 = (BallReal.pi(t.prec + 8) * t * 2).sin()
    return BallComplex(-(s.square() * 2), s2)


def chord(d: BallReal) -> BallReal:
    """|e^{2 pi i d} - 1| = 2 sin(pi |d|) for |d| <= 1/2."""
    if not isinstance(d, BallReal):
        d = BallReal(d)
    return abs((BallReal.pi(d.prec + 8) * d).sin()) * 2


def _frac_interval(lo: mpq, hi: mpq):
    """Nearest integer, side and distance bounds for every t in [lo, hi], or None if ambiguous."""
    n_lo = (lo + mpq(1, 2)) // 1
    n_hi = (hi + mpq(1, 2)) // 1
    if n_lo != n_hi:
        return None
    n = n_lo
    if lo == hi == n:
        return n, 0, mpq(0), mpq(0)
    if lo >= n:
        return n, 1, lo - n, hi - n
    if hi <= n:
        return n, -1, n - hi, n - lo
    return None


def frac_dist(theta, k, prec: int = 128):
    """(ball containing ||k theta||, side) with side +1 above / -1 below the nearest integer, 0 on it."""
    k = as_count(k)
    if not k.materialized:
        raise LazyExponent("frac_dist needs a materialized multiplier")
    n = k.value
    bits = prec + n.bit_length() + 16
    for _ in range(8):
        lo, hi = theta.enclosure(bits)
        res = _frac_interval(lo * n, hi * n)
        if res is not None:
            _, side, dlo, dhi = res
            if side == 0:
                return BallReal(0, 0, prec), 0
            width = dhi - dlo
            if width == 0 or width * (1 << prec) <= dlo or theta.source is None:
                if width and width * (1 << 16) > dlo:
                    raise PrecisionExhausted("the angle's known prefix cannot resolve ||k theta||")
                return BallReal.from_rational_interval(dlo, dhi, prec), side
        elif theta.source is None:
            raise PrecisionExhausted("the angle's known prefix cannot decide the nearest integer to k theta")
        bits *= 2
    raise PrecisionExhausted("precision cap reached in frac_dist")


def frac_ball(theta, k, prec: int = 128) -> BallReal:
    """Ball for (k theta mod 1), an exact angle reduction used for lambda^k."""
    n = as_count(k).value
    bits = prec + n.bit_length() + 16
    lo, hi = theta.enclosure(bits)
    lo, hi = lo * n, hi * n
    f = lo // 1
    return BallReal.from_rational_interval(lo - f, hi - f, prec)


def lam_pow(theta, k, prec: int = 128) -> BallComplex:
    """lambda^k = e^{2 pi i k theta} via exact reduction of k theta mod 1."""
    return circle(frac_ball(theta, k, prec))


def lam_pow_minus_one(theta, k, prec: int = 128) -> BallComplex:
    return circle_minus_one(frac_ball(theta, k, prec))


def lam_pow_minus_one_rel(theta, k, prec: int = 128) -> BallComplex:
    """lambda^k - 1 with relative (not absolute) precision, for tiny ||k theta||."""
    d, side = frac_dist(theta, k, prec)
    return circle_minus_one(d if side >= 0 else -d)


__all__ = [
    "pow_int", "circle", "circle_minus_one", "chord", "frac_dist", "frac_ball",
    "lam_pow", "lam_pow_minus_one", "lam_pow_minus_one_rel", "BigCount",
]
