"""Midpoint-radius (ball) arithmetic on top of MPFR.

Midpoints are rounded to nearest at the working precision; radii are kept at
``RAD_PREC`` bits and every radius computation is rounded upward, so each
returned ball encloses the exact result whenever the operands enclose theirs.
Transcendental functions rely on MPFR's correct rounding in directed modes.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Integral, Rational

import gmpy2
from gmpy2 import mpfr, mpq

RAD_PREC = 64
DEFAULT_PREC = 128

_ZERO = mpfr(0)


@lru_cache(maxsize=None)
def _ctx(prec: int, rnd) -> gmpy2.context:
    return gmpy2.context(precision=prec, round=rnd)


def near(prec: int) -> gmpy2.context:
    return _ctx(prec, gmpy2.RoundToNearest)


def down(prec: int) -> gmpy2.context:
    return _ctx(prec, gmpy2.RoundDown)


def up(prec: int) -> gmpy2.context:
    return _ctx(prec, gmpy2.RoundUp)


_UP = up(RAD_PREC)
_DOWN = down(RAD_PREC)


def _abs(x):
    # plain abs()/unary minus on an mpfr round to the global context precision
    return x if x >= 0 else near(x.precision).minus(x)


def _neg(x):
    return near(x.precision).minus(x)


def _ulp_err(m, prec: int):
    # |exact - RN_prec(exact)| <= |RN_prec(exact)| * 2^-prec
    if not m:
        return _ZERO
    return _UP.mul_2exp(_abs(m), -prec)


def _exact_mpfr(value, prec: int):
    """Return (mpfr, error bound) representing ``value`` at ``prec`` bits."""
    if isinstance(value, type(_ZERO)):
        return value, _ZERO
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, Integral):
        value = int(value)
        bits = max(prec, value.bit_length(), 2)
        if bits <= 1 << 16:
            return mpfr(value, bits), _ZERO
        m = near(prec).add(mpfr(0), value)
        return m, _ulp_err(m, prec)
    if isinstance(value, float):
        return mpfr(value, 53), _ZERO
    if isinstance(value, (Rational, type(mpq(1)))):
        q = mpq(value.numerator, value.denominator)
        m = mpfr(q, prec)
        if mpq(m) == q:
            return m, _ZERO
        return m, _ulp_err(m, prec)
    if isinstance(value, str):
        m = mpfr(value, prec)
        return m, _ulp_err(m, prec)
    raise TypeError(f"cannot build a ball from {type(value).__name__}")


class BallReal:
    """A real number enclosed as ``[mid - rad, mid + rad]``."""

    __slots__ = ("mid", "rad", "prec")

    def __init__(self, mid=0, rad=0, prec: int = DEFAULT_PREC):
        m, err = _exact_mpfr(mid, prec)
        r = _UP.add(mpfr(rad, RAD_PREC) if not isinstance(rad, type(_ZERO)) else rad, err)
        if not (gmpy2.is_finite(m) and gmpy2.is_finite(r)):
            raise ValueError("ball midpoint and radius must be finite")
        if r < 0:
            raise ValueError("negative radius")
        self.mid = m
        self.rad = r
        self.prec = int(prec)

    @classmethod
    def _raw(cls, mid, rad, prec):
        b = object.__new__(cls)
        b.mid = mid
        b.rad = rad
        b.prec = prec
        return b

    @classmethod
    def exact(cls, value, prec: int = DEFAULT_PREC) -> "BallReal":
        return cls(value, 0, prec)

    @classmethod
    def from_interval(cls, lo, hi, prec: int = DEFAULT_PREC) -> "BallReal":
        """Smallest convenient ball containing the closed interval [lo, hi]."""
        if isinstance(lo, (Rational, type(mpq(1)))) and not isinstance(lo, Integral):
            lo = down(prec + 8).add(mpfr(0), mpq(lo.numerator, lo.denominator))
        if isinstance(hi, (Rational, type(mpq(1)))) and not isinstance(hi, Integral):
            hi = up(prec + 8).add(mpfr(0), mpq(hi.numerator, hi.denominator))
        lo = lo if isinstance(lo, type(_ZERO)) else mpfr(lo, max(prec, 64))
        hi = hi if isinstance(hi, type(_ZERO)) else mpfr(hi, max(prec, 64))
        if lo > hi:
            raise ValueError("empty interval")
        if lo == hi:
            m, err = _exact_mpfr(lo, prec)
            if err == 0 and m == lo:
                return cls._raw(m, _ZERO, prec)
        m = near(prec).div_2exp(near(prec).add(lo, hi), 1)
        r = max(_UP.sub(hi, m), _UP.sub(m, lo))
        return cls._raw(m, r, prec)

    @classmethod
    def from_rational_interval(cls, lo, hi, prec: int = DEFAULT_PREC) -> "BallReal":
        lo = mpq(lo.numerator, lo.denominator) if not isinstance(lo, Integral) else mpq(lo)
        hi = mpq(hi.numerator, hi.denominator) if not isinstance(hi, Integral) else mpq(hi)
        if lo > hi:
            raise ValueError("empty interval")
        mq = (lo + hi) / 2
        m = mpfr(mq, prec)
        r = _UP.add(mpfr(0), max(hi - mpq(m), mpq(m) - lo))
        return cls._raw(m, r, prec)

    @classmethod
    def pi(cls, prec: int = DEFAULT_PREC) -> "BallReal":
        m = near(prec).const_pi()
        return cls._raw(m, _ulp_err(m, prec), prec)

    @classmethod
    def ln2(cls, prec: int = DEFAULT_PREC) -> "BallReal":
        m = near(prec).const_log2()
        return cls._raw(m, _ulp_err(m, prec), prec)

    # -- inspection -------------------------------------------------------
    def lower(self):
        return down(self.prec + RAD_PREC).sub(self.mid, self.rad)

    def upper(self):
        return up(self.prec + RAD_PREC).add(self.mid, self.rad)

    def mag(self):
        """Upper bound on |x|."""
        return _UP.add(_abs(self.mid), self.rad)

    def mig(self):
        """Lower bound on |x| (0 if the ball contains 0)."""
        v = _DOWN.sub(_abs(self.mid), self.rad)
        return v if v > 0 else _ZERO

    def is_exact(self) -> bool:
        return self.rad == 0

    def contains_zero(self) -> bool:
        return _abs(self.mid) <= self.rad

    def contains(self, x) -> bool:
        if isinstance(x, BallReal):
            return self.lower() <= x.lower() and x.upper() <= self.upper()
        if isinstance(x, (Rational, type(mpq(1)))) and not isinstance(x, Integral):
            x = mpq(x.numerator, x.denominator)
        return self.lower() <= x <= self.upper()

    def overlaps(self, other: "BallReal") -> bool:
        other = _coerce(other, self.prec)
        return self.lower() <= other.upper() and other.lower() <= self.upper()

    def lt(self, other):
        """True / False when decided, None when the balls overlap."""
        other = _coerce(other, self.prec)
        if self.upper() < other.lower():
            return True
        if self.lower() >= other.upper():
            return False
        return None

    def le(self, other):
        other = _coerce(other, self.prec)
        if self.upper() <= other.lower():
            return True
        if self.lower() > other.upper():
            return False
        return None

    def gt(self, other):
        return _coerce(other, self.prec).lt(self)

    def ge(self, other):
        return _coerce(other, self.prec).le(self)

    def sign(self):
        """+1/-1 when decided, 0 for the exact zero ball, None otherwise."""
        if self.mid == 0 and self.rad == 0:
            return 0
        if self.lower() > 0:
            return 1
        if self.upper() < 0:
            return -1
        return None

    def with_prec(self, prec: int) -> "BallReal":
        if prec >= self.prec or self.rad == 0 and mpfr(self.mid, prec) == self.mid:
            return BallReal._raw(self.mid, self.rad, prec)
        m = near(prec).add(_ZERO, self.mid)
        return BallReal._raw(m, _UP.add(self.rad, _UP.add(_ulp_err(m, prec), _ZERO)), prec)

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"BallReal({_short(self.mid)} +/- {float(self.rad):.3g})"

    def __str__(self) -> str:
        return f"[{float(self.mid):.17g} +/- {float(self.rad):.3g}]"

    # -- arithmetic -------------------------------------------------------
    def __neg__(self):
        return BallReal._raw(_neg(self.mid), self.rad, self.prec)

    def __pos__(self):
        return self

    def __abs__(self):
        if self.contains_zero():
            hi = self.mag()
            return BallReal.from_interval(_ZERO, hi, self.prec)
        return BallReal._raw(_abs(self.mid), self.rad, self.prec)

    def __add__(self, other):
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        p = max(self.prec, other.prec)
        m = near(p).add(self.mid, other.mid)
        r = _UP.add(_UP.add(self.rad, other.rad), _ulp_err(m, p))
        return BallReal._raw(m, r, p)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce(other, self.prec) - self

    def __mul__(self, other):
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        p = max(self.prec, other.prec)
        m = near(p).mul(self.mid, other.mid)
        r = _UP.add(_UP.mul(_abs(self.mid), other.rad), _UP.mul(_abs(other.mid), self.rad))
        r = _UP.add(r, _UP.mul(self.rad, other.rad))
        r = _UP.add(r, _ulp_err(m, p))
        return BallReal._raw(m, r, p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        if other.contains_zero():
            raise ZeroDivisionError("divisor ball contains zero")
        p = max(self.prec, other.prec)
        m = near(p).div(self.mid, other.mid)
        num = _UP.add(_UP.mul(self.rad, _abs(other.mid)), _UP.mul(_abs(self.mid), other.rad))
        den = _DOWN.mul(_abs(other.mid), _DOWN.sub(_abs(other.mid), other.rad))
        r = _UP.add(_UP.div(num, den), _ulp_err(m, p)) if num else _ulp_err(m, p)
        return BallReal._raw(m, r, p)

    def __rtruediv__(self, other):
        return _coerce(other, self.prec) / self

    def __pow__(self, k):
        if not isinstance(k, Integral):
            return NotImplemented
        k = int(k)
        if k < 0:
            return BallReal.exact(1, self.prec) / (self ** (-k))
        result = BallReal.exact(1, self.prec)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base.square()
        return result

    def square(self):
        if self.contains_zero():
            hi = _UP.mul(self.mag(), self.mag())
            return BallReal.from_interval(_ZERO, hi, self.prec)
        return self * self

    def mul_2exp(self, e: int) -> "BallReal":
        ctx = near(self.prec)
        return BallReal._raw(ctx.mul_2exp(self.mid, e), _UP.mul_2exp(self.rad, e), self.prec)

    # -- elementary functions ----------------------------------------------
    def _monotone(self, fname: str, increasing: bool = True, lo=None):
        p = self.prec
        a = self.lower() if lo is None else lo
        b = self.upper()
        flo = getattr(down(p), fname)(a) if increasing else getattr(down(p), fname)(b)
        fhi = getattr(up(p), fname)(b) if increasing else getattr(up(p), fname)(a)
        return BallReal.from_interval(flo, fhi, p)

    def sqrt(self) -> "BallReal":
        if self.upper() < 0:
            raise ValueError("sqrt of a negative ball")
        lo = self.lower()
        if self.rad == 0:
            m = near(self.prec).sqrt(self.mid)
            return BallReal._raw(m, _ulp_err(m, self.prec), self.prec)
        return self._monotone("sqrt", lo=lo if lo > 0 else _ZERO)

    def exp(self) -> "BallReal":
        if self.rad == 0:
            m = near(self.prec).exp(self.mid)
            return BallReal._raw(m, _ulp_err(m, self.prec), self.prec)
        return self._monotone("exp")

    def exp2(self) -> "BallReal":
        if self.rad == 0:
            m = near(self.prec).exp2(self.mid)
            return BallReal._raw(m, _ulp_err(m, self.prec), self.prec)
        return self._monotone("exp2")

    def log(self) -> "BallReal":
        if self.lower() <= 0:
            raise ValueError("log of a ball that is not strictly positive")
        if self.rad == 0:
            m = near(self.prec).log(self.mid)
            return BallReal._raw(m, _ulp_err(m, self.prec), self.prec)
        return self._monotone("log")

    def log2(self) -> "BallReal":
        if self.lower() <= 0:
            raise ValueError("log2 of a ball that is not strictly positive")
        if self.rad == 0:
            m = near(self.prec).log2(self.mid)
            return BallReal._raw(m, _ulp_err(m, self.prec), self.prec)
        return self._monotone("log2")

    def _trig(self, fname: str, dname: str) -> "BallReal":
        p = self.prec
        m = getattr(near(p), fname)(self.mid)
        r = _ulp_err(m, p)
        if self.rad:
            # |f(m+h) - f(m)| <= |f'(m)| |h| + h^2 / 2 for f in {sin, cos}
            d = min(_UP.add(_abs(getattr(near(RAD_PREC), dname)(self.mid)), mpfr(2) ** -60), mpfr(1))
            r = _UP.add(r, _UP.add(_UP.mul(d, self.rad), _UP.mul_2exp(_UP.mul(self.rad, self.rad), -1)))
        return BallReal._raw(m, r, p)

    def sin(self) -> "BallReal":
        return self._trig("sin", "cos")

    def cos(self) -> "BallReal":
        return self._trig("cos", "sin")

    def asin(self) -> "BallReal":
        if self.lower() < -1 or self.upper() > 1:
            raise ValueError("asin argument outside [-1, 1]")
        return self._monotone("asin")

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "mid": mpfr_to_str(self.mid),
            "mid_bits": self.mid.precision,
            "rad": mpfr_to_str(self.rad),
            "prec": self.prec,
        }

    @classmethod
    def from_json(cls, d: dict) -> "BallReal":
        prec = int(d["prec"])
        m = mpfr(d["mid"], int(d.get("mid_bits", prec)))
        r = mpfr(d["rad"], RAD_PREC)
        return cls._raw(m, r, prec)


def _short(x, digits: int = 20) -> str:
    if x == 0:
        return "0"
    mant, exp, _ = x.digits(10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    return f"{sign}{mant[0]}.{mant[1:]}e{exp - 1}"


def mpfr_to_str(x) -> str:
    """Decimal string that parses back to the identical binary value."""
    if x == 0:
        return "0"
    mant, exp, prec = x.digits(10)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    mant = mant.rstrip("0") or "0"
    return f"{sign}0.{mant}e{exp}"


def _coerce(x, prec):
    if isinstance(x, BallReal):
        return x
    if isinstance(x, (Integral, float, Rational, type(_ZERO), type(mpq(1)))):
        return BallReal(x, 0, prec)
    return NotImplemented


class BallComplex:
    """Complex ball stored as a pair of real balls (rectangular enclosure)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0, prec: int = DEFAULT_PREC):
        self.re = re if isinstance(re, BallReal) else BallReal(re, 0, prec)
        self.im = im if isinstance(im, BallReal) else BallReal(im, 0, prec)

    @classmethod
    def from_complex(cls, z, prec: int = DEFAULT_PREC) -> "BallComplex":
        z = complex(z)
        return cls(BallReal(z.real, 0, prec), BallReal(z.imag, 0, prec))

    @property
    def prec(self) -> int:
        return max(self.re.prec, self.im.prec)

    def __complex__(self):
        return complex(float(self.re.mid), float(self.im.mid))

    def __repr__(self):
        return f"BallComplex({self.re!s}, {self.im!s})"

    def __neg__(self):
        return BallComplex(-self.re, -self.im)

    def conj(self):
        return BallComplex(self.re, -self.im)

    def __add__(self, other):
        other = _ccoerce(other, self.prec)
        return BallComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _ccoerce(other, self.prec)
        return BallComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _ccoerce(other, self.prec) - self

    def __mul__(self, other):
        if isinstance(other, (BallReal, Integral, Rational, type(_ZERO))) and not isinstance(other, bool):
            return BallComplex(self.re * other, self.im * other)
        other = _ccoerce(other, self.prec)
        a, b, c, d = self.re, self.im, other.re, other.im
        return BallComplex(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def abs2(self) -> BallReal:
        return self.re.square() + self.im.square()

    def __abs__(self) -> BallReal:
        return self.abs2().sqrt()

    def __truediv__(self, other):
        if isinstance(other, (BallReal, Integral, Rational)) and not isinstance(other, bool):
            return BallComplex(self.re / other, self.im / other)
        other = _ccoerce(other, self.prec)
        den = other.abs2()
        if den.contains_zero():
            raise ZeroDivisionError("divisor ball contains zero")
        num = self * other.conj()
        return BallComplex(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return _ccoerce(other, self.prec) / self

    def __pow__(self, k):
        if not isinstance(k, Integral):
            return NotImplemented
        k = int(k)
        if k < 0:
            return BallComplex(1, 0, self.prec) / (self ** (-k))
        result = BallComplex(1, 0, self.prec)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def contains(self, z) -> bool:
        if isinstance(z, BallComplex):
            return self.re.contains(z.re) and self.im.contains(z.im)
        z = complex(z) if not isinstance(z, tuple) else z
        if isinstance(z, tuple):
            return self.re.contains(z[0]) and self.im.contains(z[1])
        return self.re.contains(z.real) and self.im.contains(z.imag)

    def overlaps(self, other) -> bool:
        other = _ccoerce(other, self.prec)
        return self.re.overlaps(other.re) and self.im.overlaps(other.im)

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def mag(self):
        """Upper bound on |z|."""
        return _UP.sqrt(_UP.add(_UP.mul(self.re.mag(), self.re.mag()), _UP.mul(self.im.mag(), self.im.mag())))

    def mig(self):
        """Lower bound on |z|."""
        a, b = self.re.mig(), self.im.mig()
        return _DOWN.sqrt(_DOWN.add(_DOWN.mul(a, a), _DOWN.mul(b, b)))

    def radius(self):
        """Upper bound on the distance from the midpoint to any enclosed value."""
        return _UP.sqrt(_UP.add(_UP.mul(self.re.rad, self.re.rad), _UP.mul(self.im.rad, self.im.rad)))

    def inflate(self, r) -> "BallComplex":
        """Grow the enclosure by ``r`` in each component."""
        r = mpfr(r, RAD_PREC) if not isinstance(r, type(_ZERO)) else r
        return BallComplex(
            BallReal._raw(self.re.mid, _UP.add(self.re.rad, r), self.re.prec),
            BallReal._raw(self.im.mid, _UP.add(self.im.rad, r), self.im.prec),
        )

    def with_prec(self, prec: int) -> "BallComplex":
        return BallComplex(self.re.with_prec(prec), self.im.with_prec(prec))

    def to_json(self) -> dict:
        return {"re": self.re.to_json(), "im": self.im.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "BallComplex":
        return cls(BallReal.from_json(d["re"]), BallReal.from_json(d["im"]))


def _ccoerce(x, prec):
    if isinstance(x, BallComplex):
        return x
    if isinstance(x, BallReal):
        return BallComplex(x, BallReal(0, 0, x.prec))
    if isinstance(x, complex):
        return BallComplex.from_complex(x, prec)
    if isinstance(x, (Integral, float, Rational, type(_ZERO))):
        return BallComplex(BallReal(x, 0, prec), BallReal(0, 0, prec))
    raise TypeError(f"cannot coerce {type(x).__name__} to BallComplex")


def as_fraction(x) -> Fraction:
    """Exact rational value of an mpfr / mpq / int."""
    q = mpq(x)
    return Fraction(int(q.numerator), int(q.denominator))
