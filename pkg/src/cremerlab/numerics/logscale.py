"""Numbers stored by a two-sided bound on log2 of their magnitude.

Bounds are exact rationals (``gmpy2.mpq``), so products and integer powers
move them exactly; only sums and conversions introduce (outward) rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Integral

import gmpy2
from gmpy2 import mpfr, mpq

from ..errors import LazyExponent
from .ball import BallReal, _abs, _neg, down, up

_ZF = mpfr(0)

# log2(1 + 2^-t) < 2^-t / ln 2 < 2^(1-t); beyond this t we stop computing it
_HUGE_GAP = 4096
_LOG_PREC = 96


def _q(x) -> mpq:
    if isinstance(x, type(mpq(0))):
        return x
    if isinstance(x, Integral):
        return mpq(int(x))
    return mpq(x)


def qceil(x) -> int:
    """Exact ceiling of an mpq/mpfr/int (gmpy2.ceil would round through a float context)."""
    q = _q(x)
    return -((-q.numerator) // q.denominator)


def qfloor(x) -> int:
    q = _q(x)
    return q.numerator // q.denominator


def _log2_bounds_int(n: int, prec: int = _LOG_PREC):
    """Exact rational bounds on log2(n) for an integer n >= 1."""
    if n < 1:
        raise ValueError("log2 of a non-positive integer")
    if n & (n - 1) == 0:
        e = mpq(n.bit_length() - 1)
        return e, e
    b = n.bit_length()
    p = max(prec, 2 * b.bit_length() + prec)
    # scale to [1, 2) so the mantissa fits at any size
    shift = max(b - p - 8, 0)
    lo_n, hi_n = n >> shift, -((-n) >> shift)
    lo = mpq(down(p).log2(mpfr(lo_n, max(p, lo_n.bit_length())))) + shift
    hi = mpq(up(p).log2(mpfr(hi_n, max(p, hi_n.bit_length())))) + shift
    return lo, hi


def log2_bounds(x, prec: int = _LOG_PREC):
    """Rational bounds on log2|x| for an int, mpq, mpfr or positive BallReal."""
    if isinstance(x, BallReal):
        lo, hi = x.lower(), x.upper()
        if lo <= 0:
            raise ValueError("ball is not strictly positive")
        p = max(prec, x.prec)
        return mpq(down(p).log2(lo)), mpq(up(p).log2(hi))
    if isinstance(x, Integral):
        return _log2_bounds_int(abs(int(x)), prec)
    if isinstance(x, type(mpq(0))):
        a, b = _log2_bounds_int(abs(int(x.numerator)), prec), _log2_bounds_int(int(x.denominator), prec)
        return a[0] - b[1], a[1] - b[0]
    p = max(prec, x.precision)
    x = _abs(x)
    return mpq(down(p).log2(x)), mpq(up(p).log2(x))


def _log1p2_bounds(t):
    """Bounds on log2(1 + 2^-t) for rational t >= 0."""
    if t > _HUGE_GAP:
        return mpq(0), mpq(1, 1 << (_HUGE_GAP - 1))
    tf_lo = down(_LOG_PREC).add(_ZF, t) if t.denominator != 1 else mpfr(int(t), _LOG_PREC)
    tf_hi = up(_LOG_PREC).add(_ZF, t) if t.denominator != 1 else tf_lo
    lo = down(_LOG_PREC).log2(down(_LOG_PREC).add(1, down(_LOG_PREC).exp2(_neg(tf_hi))))
    hi = up(_LOG_PREC).log2(up(_LOG_PREC).add(1, up(_LOG_PREC).exp2(_neg(tf_lo))))
    return mpq(lo), mpq(hi)


def _log1m2_bounds(t):
    """Bounds on log2(1 - 2^-t) for rational t > 0 (a negative number)."""
    if t > _HUGE_GAP:
        return -mpq(1, 1 << (_HUGE_GAP - 2)), mpq(0)
    tf_lo = down(_LOG_PREC).add(_ZF, t)
    tf_hi = up(_LOG_PREC).add(_ZF, t)
    lo = down(_LOG_PREC).log2(down(_LOG_PREC).sub(1, up(_LOG_PREC).exp2(_neg(tf_lo))))
    hi = up(_LOG_PREC).log2(up(_LOG_PREC).sub(1, down(_LOG_PREC).exp2(_neg(tf_hi))))
    return mpq(lo), mpq(hi)


@dataclass(frozen=True)
class LogScaleReal:
    """sign * 2^t for some t in [log2_lo, log2_hi]."""

    sign: int
    log2_lo: mpq = mpq(0)
    log2_hi: mpq = mpq(0)

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        object.__setattr__(self, "log2_lo", _q(self.log2_lo))
        object.__setattr__(self, "log2_hi", _q(self.log2_hi))
        if self.log2_lo > self.log2_hi:
            raise ValueError("log2_lo > log2_hi")

    # -- constructors ---------------------------------------------------------
    @classmethod
    def zero(cls) -> "LogScaleReal":
        return cls(0)

    @classmethod
    def exact_pow2(cls, e, sign: int = 1) -> "LogScaleReal":
        return cls(sign, _q(e), _q(e))

    @classmethod
    def from_value(cls, x) -> "LogScaleReal":
        if isinstance(x, BallReal):
            s = x.sign()
            if s is None:
                raise ValueError("sign of ball undecided")
            if s == 0:
                return cls(0)
            lo, hi = log2_bounds(abs(x))
            return cls(s, lo, hi)
        if x == 0:
            return cls(0)
        s = 1 if x > 0 else -1
        lo, hi = log2_bounds(x)
        return cls(s, lo, hi)

    # -- arithmetic -------------------------------------------------------------
    def __mul__(self, other):
        if not isinstance(other, LogScaleReal):
            other = LogScaleReal.from_value(other)
        if self.sign == 0 or other.sign == 0:
            return LogScaleReal(0)
        return LogScaleReal(self.sign * other.sign, self.log2_lo + other.log2_lo, self.log2_hi + other.log2_hi)

    __rmul__ = __mul__

    def reciprocal(self) -> "LogScaleReal":
        if self.sign == 0:
            raise ZeroDivisionError("reciprocal of zero")
        return LogScaleReal(self.sign, -self.log2_hi, -self.log2_lo)

    def __truediv__(self, other):
        if not isinstance(other, LogScaleReal):
            other = LogScaleReal.from_value(other)
        return self * other.reciprocal()

    def __pow__(self, k):
        k = _q(k)
        if self.sign == 0:
            if k <= 0:
                raise ZeroDivisionError("non-positive power of zero")
            return self
        if self.sign < 0:
            if k.denominator != 1:
                raise ValueError("fractional power of a negative number")
            s = -1 if int(k) % 2 else 1
        else:
            s = 1
        if k >= 0:
            return LogScaleReal(s, self.log2_lo * k, self.log2_hi * k)
        return LogScaleReal(s, self.log2_hi * k, self.log2_lo * k)

    def __neg__(self):
        return LogScaleReal(-self.sign, self.log2_lo, self.log2_hi)

    def __abs__(self):
        return LogScaleReal(abs(self.sign), self.log2_lo, self.log2_hi)

    def __add__(self, other):
        if not isinstance(other, LogScaleReal):
            other = LogScaleReal.from_value(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        if self.sign == other.sign:
            big_hi, small_hi = max(self.log2_hi, other.log2_hi), min(self.log2_hi, other.log2_hi)
            big_lo, small_lo = max(self.log2_lo, other.log2_lo), min(self.log2_lo, other.log2_lo)
            hi = big_hi + _log1p2_bounds(big_hi - small_hi)[1]
            lo = big_lo + _log1p2_bounds(big_lo - small_lo)[0]
            return LogScaleReal(self.sign, lo, hi)
        # opposite signs: decided only when one magnitude dominates the other
        if self.log2_lo > other.log2_hi:
            big, small = self, other
        elif other.log2_lo > self.log2_hi:
            big, small = other, self
        else:
            raise ValueError("cancellation in log-scale subtraction is undecided")
        lo = big.log2_lo + _log1m2_bounds(big.log2_lo - small.log2_hi)[0]
        return LogScaleReal(big.sign, lo, big.log2_hi)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, LogScaleReal):
            other = LogScaleReal.from_value(other)
        return self + (-other)

    def scale_log(self, factor) -> "LogScaleReal":
        """The m-th root style map t -> t * factor on the log bounds (factor > 0)."""
        factor = _q(factor)
        return LogScaleReal(self.sign, self.log2_lo * factor, self.log2_hi * factor)

    # -- comparison -------------------------------------------------------------
    def _key(self):
        # map to an ordered interval on the signed log scale
        return self.sign

    def lt(self, other):
        """True / False when decided by disjoint bounds, None otherwise."""
        if not isinstance(other, LogScaleReal):
            other = LogScaleReal.from_value(other)
        if self.sign != other.sign:
            return self.sign < other.sign
        if self.sign == 0:
            return False
        if self.log2_hi < other.log2_lo:
            return self.sign > 0
        if self.log2_lo > other.log2_hi:
            return self.sign < 0
        return None

    def gt(self, other):
        if not isinstance(other, LogScaleReal):
            other = LogScaleReal.from_value(other)
        return other.lt(self)

    def le(self, other):
        """True only if decided; the closed case uses touching exact bounds."""
        if not isinstance(other, LogScaleReal):
            other = LogScaleReal.from_value(other)
        r = self.lt(other)
        if r is not None:
            return r
        if self.sign == other.sign and self.sign != 0:
            if self.sign > 0 and self.log2_hi <= other.log2_lo:
                return True
            if self.sign < 0 and self.log2_lo >= other.log2_hi:
                return True
        if self.sign == 0 and other.sign == 0:
            return True
        return None

    def ge(self, other):
        if not isinstance(other, LogScaleReal):
            other = LogScaleReal.from_value(other)
        return other.le(self)

    # -- conversion ---------------------------------------------------------------
    def representable(self, limit: int = 1 << 28) -> bool:
        return self.sign == 0 or (abs(self.log2_lo) < limit and abs(self.log2_hi) < limit)

    def to_ball(self, prec: int = 128) -> BallReal:
        if self.sign == 0:
            return BallReal(0, 0, prec)
        if not self.representable():
            raise OverflowError("magnitude outside the floating-point exponent range")
        lo = down(prec).exp2(down(prec + 64).add(_ZF, self.log2_lo))
        hi = up(prec).exp2(up(prec + 64).add(_ZF, self.log2_hi))
        b = BallReal.from_interval(lo, hi, prec)
        return b if self.sign > 0 else -b

    def upper_float(self) -> float:
        return float(gmpy2.exp2(mpfr(self.log2_hi, 64)))

    def log2_mid(self) -> float:
        return float((self.log2_lo + self.log2_hi) / 2)

    def to_json(self) -> dict:
        return {"sign": self.sign, "log2_lo": _qstr(self.log2_lo), "log2_hi": _qstr(self.log2_hi)}

    @classmethod
    def from_json(cls, d: dict) -> "LogScaleReal":
        return cls(int(d["sign"]), mpq(d["log2_lo"]), mpq(d["log2_hi"]))

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogScaleReal(0)"
        s = "+" if self.sign > 0 else "-"
        return f"LogScaleReal({s}2^[{float(self.log2_lo):.6g}, {float(self.log2_hi):.6g}])"


def _qstr(q) -> str:
    q = mpq(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class CeilExpr:
    """The exact integer ceil((A * 2^E + B) / D) with A, D > 0 and E >= 0."""

    A: int
    E: int
    B: int
    D: int

    def __post_init__(self):
        if self.A <= 0 or self.D <= 0 or self.E < 0:
            raise ValueError("CeilExpr needs A > 0, D > 0, E >= 0")
        if self.A * 2 ** min(self.E, 64) + self.B <= 0 and self.E <= 64:
            raise ValueError("CeilExpr must describe a positive number")

    @property
    def approx_bits(self) -> int:
        return self.E + self.A.bit_length() - self.D.bit_length() + 1

    def materialize(self, bit_budget: int) -> int:
        if self.approx_bits > bit_budget:
            raise LazyExponent(f"integer of about {self.approx_bits} bits exceeds budget {bit_budget}")
        return -((-(self.A * (1 << self.E) + self.B)) // self.D)

    def log2_bounds(self):
        """Bounds on log2 of the integer, valid without materializing it."""
        # A 2^E + B lies in A 2^E (1 + B/(A 2^E)); |B| < A 2^E / 2 is required for the lazy path
        if self.E <= 4096:
            v = self.materialize(1 << 20)
            return _log2_bounds_int(v)
        if abs(self.B).bit_length() + 2 >= self.E:
            raise ValueError("lazy CeilExpr with |B| comparable to 2^E")
        a_lo, a_hi = _log2_bounds_int(self.A)
        d_lo, d_hi = _log2_bounds_int(self.D)
        # relative perturbation |B|/(A 2^E) + D/(A 2^E) < 2^-(E - bits) , so the log moves by < 2^(2 - gap)
        gap = self.E - max(abs(self.B).bit_length(), self.D.bit_length()) - 2
        eps = mpq(1, 1 << min(gap, _HUGE_GAP)) * 4
        return self.E + a_lo - d_hi - eps, self.E + a_hi - d_lo + eps

    def __str__(self) -> str:
        return f"ceil(({self.A}*2^{self.E}+{self.B})/{self.D})"

    @classmethod
    def parse(cls, s: str) -> "CeilExpr":
        body = s.strip()
        if not (body.startswith("ceil((") and body.endswith(")")):
            raise ValueError(f"not a ceiling expression: {s!r}")
        inner, d = body[len("ceil(("):-1].rsplit(")/", 1)
        a, rest = inner.split("*2^", 1)
        # B may be negative: split on the first sign after the exponent digits
        i = 1
        while i < len(rest) and rest[i].isdigit():
            i += 1
        e, b = rest[:i], rest[i:]
        return cls(int(a), int(e), int(b.lstrip("+")) if b else 0, int(d))


class BigCount:
    """A natural number that is either an exact int or a lazily described ceiling."""

    __slots__ = ("_value", "expr", "log")

    def __init__(self, value=None, expr: CeilExpr | None = None, log: LogScaleReal | None = None):
        if value is None and expr is None:
            raise ValueError("BigCount needs a value or an expression")
        if value is not None:
            value = int(value)
            if value < 0:
                raise ValueError("BigCount is a natural number")
        self._value = value
        self.expr = expr
        if log is None:
            if value is not None:
                log = LogScaleReal.from_value(value) if value else LogScaleReal.zero()
            else:
                lo, hi = expr.log2_bounds()
                log = LogScaleReal(1, lo, hi)
        self.log = log

    @classmethod
    def lazy(cls, expr: CeilExpr) -> "BigCount":
        return cls(None, expr)

    @property
    def materialized(self) -> bool:
        return self._value is not None

    @property
    def value(self) -> int:
        if self._value is None:
            raise LazyExponent(f"count {self.expr} is not materialized")
        return self._value

    def bit_length(self) -> int:
        if self._value is not None:
            return self._value.bit_length()
        return qceil(self.log.log2_hi) + 1

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, BigCount):
            if self.materialized and other.materialized:
                return self._value == other._value
            return self.expr == other.expr and self._value == other._value
        if isinstance(other, Integral) and self.materialized:
            return self._value == int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self._value, self.expr))

    def __repr__(self):
        if self.materialized:
            v = self._value
            return f"BigCount({v})" if v.bit_length() < 80 else f"BigCount(<{v.bit_length()} bits>)"
        return f"BigCount(lazy {self.expr}, {self.log})"

    def to_json(self):
        if self.materialized:
            return str(self._value)
        d = self.log.to_json()
        d["ceil"] = str(self.expr)
        return d

    @classmethod
    def from_json(cls, d) -> "BigCount":
        if isinstance(d, (str, int)):
            return cls(int(d))
        return cls(None, CeilExpr.parse(d["ceil"]), LogScaleReal.from_json(d))


def as_count(k) -> BigCount:
    return k if isinstance(k, BigCount) else BigCount(int(k))
