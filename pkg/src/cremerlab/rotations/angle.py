"""Rotation numbers held as continued fractions theta = [0; a1, a2, ...]."""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral
from typing import Callable, Optional

from gmpy2 import mpq

from ..errors import BadInput, LazyLevel, PrecisionExhausted
from ..numerics.ball import BallReal
from ..numerics.logscale import BigCount, LogScaleReal, _log2_bounds_int

# below this many bits a lazy quotient 2^E is materialized when computing enclosures
_ENCLOSURE_CAP = 4096


def _gold(i: int) -> int:
    return 1


class RotationNumber:
    """theta in (0, 1) given by its partial quotients.

    ``quotients`` is the explicit prefix (ints, or lazy ``BigCount`` values at
    deep positions).  Beyond the prefix the quotient stream comes from
    ``source(i)`` (1-based index) if given; otherwise the expansion is either
    ``terminal`` (theta is the rational number the prefix spells) or open, in
    which case every statement made about theta holds for any continuation.
    """

    def __init__(self, quotients=(), source: Optional[Callable[[int], int]] = None,
                 terminal: bool = False, name: str = ""):
        qs = []
        for a in quotients:
            if isinstance(a, BigCount) and a.materialized:
                a = a.value
            if isinstance(a, Integral):
                a = int(a)
                if a < 1:
                    raise BadInput("partial quotients must be positive integers")
            elif not isinstance(a, BigCount):
                raise BadInput(f"bad partial quotient {a!r}")
            qs.append(a)
        if terminal and source is not None:
            raise BadInput("a terminal expansion cannot have a quotient source")
        if terminal and not qs:
            raise BadInput("empty terminal expansion")
        if terminal and qs == [1]:
            raise BadInput("[0; 1] equals 1, outside (0, 1)")
        if terminal and isinstance(qs[-1], BigCount):
            raise BadInput("terminal expansion must end in a materialized quotient")
        self._qs = qs
        self.source = source
        self.terminal = terminal
        self.name = name

    # -- constructors -----------------------------------------------------------
    @classmethod
    def golden(cls) -> "RotationNumber":
        """(sqrt(5) - 1) / 2 = [0; 1, 1, 1, ...]."""
        return cls((), source=_gold, name="golden")

    @classmethod
    def from_fraction(cls, x) -> "RotationNumber":
        x = Fraction(x)
        if not 0 < x < 1:
            raise BadInput("rational angle must lie in (0, 1)")
        qs = []
        p, q = x.numerator, x.denominator
        while q:
            a, r = divmod(p, q)
            qs.append(a)
            p, q = q, r
        qs = qs[1:]
        # canonical form never ends in 1 (except [0; 1] itself, excluded above)
        if len(qs) > 1 and qs[-1] == 1:
            qs = qs[:-2] + [qs[-2] + 1]
        return cls(qs, terminal=True, name=str(x))

    @classmethod
    def from_quotients(cls, quotients, tail: str = "open") -> "RotationNumber":
        if tail not in ("open", "terminal", "golden"):
            raise BadInput("tail must be open, terminal or golden")
        if tail == "golden":
            return cls(quotients, source=_gold)
        return cls(quotients, terminal=(tail == "terminal"))

    # -- quotient access --------------------------------------------------------
    def quotient(self, i: int):
        """a_i (1-based), pulling from the source if needed; None past a finite end."""
        while len(self._qs) < i and self.source is not None:
            a = int(self.source(len(self._qs) + 1))
            if a < 1:
                raise BadInput("quotient source produced a non-positive value")
            self._qs.append(a)
        if i <= len(self._qs):
            return self._qs[i - 1]
        return None

    @property
    def prefix(self) -> list:
        return list(self._qs)

    @property
    def is_rational(self) -> bool:
        return self.terminal

    def materialized_length(self) -> int:
        n = 0
        for a in self._qs:
            if isinstance(a, BigCount):
                break
            n += 1
        return n

    # -- convergents -------------------------------------------------------------
    def convergents(self, K: int) -> list:
        """[(p_1, q_1), ..., (p_K, q_K)]; shorter if the expansion terminates."""
        out = []
        p0, q0, p1, q1 = 1, 0, 0, 1  # (p_{-1}, q_{-1}), (p_0, q_0)
        for i in range(1, K + 1):
            a = self.quotient(i)
            if a is None:
                break
            if isinstance(a, BigCount):
                raise LazyLevel(f"partial quotient a_{i} is only known in log scale")
            p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
            out.append((p1, q1))
        return out

    def convergent_index(self, q: int, search: int = 4096):
        """n with q_n == q (q_0 = 1 counts), or None."""
        if q == 1:
            return 0
        q0, q1 = 0, 1
        for i in range(1, search + 1):
            a = self.quotient(i)
            if a is None or isinstance(a, BigCount):
                return None
            q0, q1 = q1, a * q1 + q0
            if q1 == q:
                return i
            if q1 > q:
                return None
        return None

    def tail_enclosure(self, n: int, cap: int = _ENCLOSURE_CAP):
        """Rational bounds (lo, hi) on the complete quotient x_{n+1}; hi may be None for infinity."""
        a = self.quotient(n + 1)
        if a is None:
            if self.terminal:
                return None  # no tail: theta equals p_n / q_n
            return mpq(1), None
        if isinstance(a, BigCount):
            e = a.expr
            if e is not None and e.A == 1 and e.B == 0 and e.D == 1:
                return mpq(2) ** min(e.E, cap), None
            lo = a.log.log2_lo
            return mpq(2) ** min(int(lo) - 1, cap), None
        nxt = self.quotient(n + 2)
        if nxt is None and self.terminal:
            return mpq(a), mpq(a)
        return mpq(a), mpq(a + 1)

    def enclosure(self, bits: int = 128, cap: int | None = None):
        """Exact rationals lo <= theta <= hi with hi - lo <= 2^-bits when the prefix allows."""
        cap = max(_ENCLOSURE_CAP, bits + 64) if cap is None else cap
        target = mpq(1, 1 << bits) if bits > 0 else mpq(1)
        p0, q0, p1, q1 = 1, 0, 0, 1
        n = 0
        while True:
            a = self.quotient(n + 1)
            if a is None or isinstance(a, BigCount):
                break
            p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
            n += 1
            # |theta - p_n/q_n| < 1/(q_n q_{n+1}) <= 1/q_n^2
            if self.source is not None and mpq(1, q1 * q1) < target:
                break
        tail = self.tail_enclosure(n, cap)
        if tail is None:
            v = mpq(p1, q1)
            return v, v
        xlo, xhi = tail
        e1 = (p1 * xlo + p0) / (q1 * xlo + q0)
        e2 = mpq(p1, q1) if xhi is None else (p1 * xhi + p0) / (q1 * xhi + q0)
        return min(e1, e2), max(e1, e2)

    def ball(self, prec: int = 128) -> BallReal:
        lo, hi = self.enclosure(prec + 8)
        return BallReal.from_rational_interval(lo, hi, prec)

    def __float__(self) -> float:
        lo, hi = self.enclosure(64)
        return float((lo + hi) / 2)

    def __repr__(self) -> str:
        if self.name:
            return f"RotationNumber({self.name})"
        shown = ", ".join(str(a) if isinstance(a, int) and a < 10**12 else "…" for a in self._qs[:8])
        more = ", …" if len(self._qs) > 8 or not self.terminal else ""
        return f"RotationNumber([0; {shown}{more}])"

    # -- serialization ----------------------------------------------------------------
    def to_json(self) -> dict:
        if self.source is None:
            tail = "terminal" if self.terminal else "open"
        elif self.source is _gold:
            tail = "golden"
        else:
            raise BadInput("an angle with a custom quotient source cannot be serialized")
        return {"quotients": [a.to_json() if isinstance(a, BigCount) else str(a) for a in self._qs],
                "tail": tail, "name": self.name}

    @classmethod
    def from_json(cls, d: dict) -> "RotationNumber":
        qs = [BigCount.from_json(a) if isinstance(a, dict) else int(a) for a in d["quotients"]]
        th = cls.from_quotients(qs, tail=d.get("tail", "open"))
        th.name = d.get("name", "")
        return th

    # -- derived angles -------------------------------------------------------------
    def negated(self) -> "RotationNumber":
        """The angle 1 - theta (rotation by the inverse multiplier)."""
        a1 = self.quotient(1)
        if a1 is None:
            raise BadInput("empty expansion")
        if isinstance(a1, BigCount):
            raise LazyLevel("first quotient is lazy")
        src = self.source
        if a1 >= 2:
            qs = [1, a1 - 1] + self._qs[1:]
            shift = 1
        else:
            a2 = self.quotient(2)
            if a2 is None:
                raise BadInput("angle 1 has no inverse in (0, 1)")
            if isinstance(a2, BigCount):
                raise LazyLevel("second quotient is lazy")
            qs = [1 + a2] + self._qs[2:]
            shift = -1
        if self.terminal and len(qs) > 1 and qs[-1] == 1:
            qs = qs[:-2] + [qs[-2] + 1]
        if src is None or src is _gold:
            new_src = src
        else:
            new_src = lambda i, s=src, d=shift: s(i - d)  # noqa: E731
        name = f"1-{self.name}" if self.name else ""
        return RotationNumber(qs, source=new_src, terminal=self.terminal, name=name)

    def power_angle(self, l: int, bits: int = 256) -> "RotationNumber":
        """Angle of lambda^l, i.e. frac(l * theta)."""
        l = int(l)
        if l < 1:
            raise BadInput("power must be >= 1")
        if l == 1:
            return self
        if self.terminal:
            lo, _ = self.enclosure()
            f = Fraction(int((l * lo).numerator), int((l * lo).denominator)) % 1
            if f == 0:
                raise BadInput("lambda^l = 1: the angle reduces to 0")
            return RotationNumber.from_fraction(f)
        lo, hi = self.enclosure(bits + l.bit_length())
        n = (l * lo) // 1
        if (l * hi) // 1 != n:
            raise PrecisionExhausted("l * theta straddles an integer at this precision")
        qa, qb = _cf(l * lo - n), _cf(l * hi - n)
        common = []
        for a, b in zip(qa, qb):
            if a != b:
                break
            common.append(a)
        if not common:
            raise PrecisionExhausted("no common continued-fraction prefix")
        # the last shared quotient is only a lower bound for the true one unless followed by agreement
        common = common[:-1] if len(common) > 1 else common
        name = f"frac({l}*{self.name})" if self.name else ""
        return RotationNumber(common, name=name)


def _cf(x: mpq, limit: int = 10000) -> list:
    out = []
    p, q = int(x.numerator), int(x.denominator)
    if p == 0:
        return out
    p, q = q, p
    while q and len(out) < limit:
        a, r = divmod(p, q)
        out.append(a)
        p, q = q, r
    return out


def delta_convergent_log(theta: RotationNumber, n: int) -> LogScaleReal:
    """Log-scale bounds on ||q_n theta|| = 1 / (q_n x_{n+1} + q_{n-1}).

    Works when a_{n+1} is lazy, where the distance is far below any
    floating-point exponent range.
    """
    conv = theta.convergents(n) if n > 0 else []
    q1 = conv[-1][1] if n > 0 else 1
    q0 = conv[-2][1] if n > 1 else (1 if n == 1 else 0)
    a = theta.quotient(n + 1)
    if a is None:
        raise PrecisionExhausted("no tail information")
    if isinstance(a, BigCount):
        a_lo = a.log
        # x_{n+1} in [a, a + 1]; so the denominator is in [q_n a + q_{n-1}, q_n (a+1) + q_{n-1}]
        qlog = LogScaleReal(1, *_log2_bounds_int(q1))
        den_lo = qlog * a_lo + LogScaleReal.from_value(q0) if q0 else qlog * a_lo
        den_hi = qlog * (a_lo + LogScaleReal.from_value(1)) + LogScaleReal.from_value(q1 + q0)
        return LogScaleReal(1, -den_hi.log2_hi, -den_lo.log2_lo)
    lo, hi = theta.tail_enclosure(n)
    den_lo = q1 * lo + q0
    den_hi = q1 * hi + q0 if hi is not None else q1 * (lo + 1) + q0
    lo_l = LogScaleReal.from_value(den_lo)
    hi_l = LogScaleReal.from_value(den_hi)
    return LogScaleReal(1, -hi_l.log2_hi, -lo_l.log2_lo)
