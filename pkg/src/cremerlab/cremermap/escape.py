"""Escape certificates: |L_{k_j} a(x)| > j > diameter(U), proved level by level."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from gmpy2 import mpfr, mpq

from ..errors import BadInput, InsufficientDepth, PrecisionExhausted
from ..numerics.ball import BallComplex, mpfr_to_str
from ..numerics.logscale import BigCount, LogScaleReal, log2_bounds
from ..seedforge.forge import log2_int_pow
from .series import CremerMapSpec, _ls_range, _ls_upper, coerce_point, eval_Lk

ESCAPED, FIXED_CURVE, NOT_ESCAPED = "ESCAPED", "FIXED_CURVE", "NOT_ESCAPED"


@dataclass(frozen=True)
class DomainCxU:
    """C^n x U with U the disk of the given center and radius; d = 2 radius."""

    center: complex = 0j
    radius: float = 0.4

    def __post_init__(self):
        if not (self.radius > 0) or self.radius == float("inf"):
            raise BadInput("U radius must be positive and finite")

    @property
    def diameter(self) -> float:
        return 2 * self.radius

    def contains(self, y) -> bool:
        return abs(complex(y) - complex(self.center)) < self.radius


@dataclass
class ChainBounds:
    """The three-part estimate for one level, sharp (x-dependent) and in closed form."""

    j: int
    main_lower: LogScaleReal
    main_upper: LogScaleReal
    middle_upper: LogScaleReal
    tail_upper: LogScaleReal
    lower: LogScaleReal
    upper: LogScaleReal
    closed_middle: LogScaleReal  # 2^{m_j} - 1 - j, from (C2)
    closed_upper: LogScaleReal  # 2 (2 j^2)^{m_j} + 2^{m_j} - j
    checks: dict = field(default_factory=dict)  # required for the chain's conclusion
    info: dict = field(default_factory=dict)  # the lemma's hypotheses and intermediate steps

    @property
    def ok(self) -> bool:
        return all(v is True for v in self.checks.values())


@dataclass
class EscapeCertificate:
    level: int | None
    k: BigCount | None
    direction: str
    lower: LogScaleReal | None
    upper: LogScaleReal | None
    diameter: float
    verdict: str
    conditions_used: tuple = ()
    toy: bool = False
    chain: ChainBounds | None = None

    def lower_bound_log2(self) -> str | None:
        return None if self.lower is None else mpfr_to_str(mpfr(self.lower.log2_lo, 64))

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "k": None if self.k is None else self.k.to_json(),
            "direction": self.direction,
            "lower_bound_log2": self.lower_bound_log2(),
            "diameter": repr(float(self.diameter)),
            "verdict": self.verdict,
            "conditions_used": list(self.conditions_used),
            "toy": self.toy,
            "rigorous": not self.toy,
        }


def _xabs(v: BallComplex) -> LogScaleReal:
    return _ls_range(v.mig(), v.mag())


def lemma_chain(spec: CremerMapSpec, j: int, x) -> ChainBounds:
    """Bounds on |(L_{k_j} a)(x)|, valid whenever max|x_i| <= J + 1.

    The lemma's hypotheses max|x_i| <= j and |x_[j]| >= 1/j are what make the
    conclusion j <= |L a| <= 2(2j^2)^m + 2^m - j hold; they are reported in ``info``.

    main   = |lambda^{k m} - 1| (2j|x_[j]|)^m       in [(2j|x|)^m, 2 (2j|x|)^m]  by (C4)
    middle = sum_{l<j} |lambda^{k m_l} - 1| (2l|x_[l]|)^{m_l} <= sum 2 (2l|x|)^{m_l} <= 2^m - 1 - j  by (C2)
    tail   <= k_j sum_{l>j} (2l|x|/M_l)^{m_l} <= k_j 2^{-r_j} < 1  by (C1), (C3), (C5)
    """
    x = coerce_point(spec, x)
    lv = spec.level(j)
    m = lv.m
    xj = x[spec.index(j)]
    info = {
        "max_abs_le_j": all(v.mag() <= j for v in x),
        "abs_xj_ge_inv_j": mpq(xj.mig()) * j >= 1,
    }
    checks = {"in_range": all(v.mag() <= spec.J + 1 for v in x)}
    ax = _xabs(xj)
    two_j = log2_int_pow(2 * j, 1)
    base = two_j * ax
    main_lo = LogScaleReal(1, base.log2_lo * m, base.log2_hi * m)
    main_hi = main_lo * LogScaleReal.exact_pow2(1)
    main_lo = LogScaleReal(1, main_lo.log2_lo, main_lo.log2_lo)  # a lower bound only
    middle = LogScaleReal(0)
    for l in range(1, j):
        ll = spec.level(l)
        xl = x[spec.index(l)].mag()
        if xl == 0:
            continue
        b = log2_int_pow(2 * l, 1) * _ls_upper(xl)
        middle = middle + LogScaleReal(1, b.log2_hi * ll.m + 1, b.log2_hi * ll.m + 1)
    tail = LogScaleReal(0)
    for l in range(j + 1, spec.J + 1):
        ll = spec.level(l)
        xl = x[spec.index(l)].mag()
        if xl == 0:
            continue
        b = log2_int_pow(2 * l, 1) * _ls_upper(xl) / ll.log_M
        tail = tail + LogScaleReal(1, b.log2_hi * ll.m, b.log2_hi * ll.m)
    tail = tail + spec.extension_bound()
    if tail.sign:
        tail = tail * lv.k.log
    one = LogScaleReal.exact_pow2(0)
    info["main_ge_2^m"] = main_lo.ge(LogScaleReal.exact_pow2(m))
    checks["tail_lt_1"] = tail.lt(one) if tail.sign else True
    closed_middle = LogScaleReal.exact_pow2(m) - LogScaleReal.from_value(1 + j)
    info["middle_le_c2"] = middle.le(closed_middle) if middle.sign else True
    try:
        lower = main_lo - middle - tail
    except ValueError:
        lower = LogScaleReal(0)
    upper = main_hi + middle + tail
    closed_upper = (LogScaleReal.exact_pow2(1) * log2_int_pow(2 * j * j, m)
                   + LogScaleReal.exact_pow2(m) - LogScaleReal.from_value(j))
    checks["lower_ge_j"] = lower.ge(LogScaleReal.from_value(j)) if lower.sign > 0 else False
    checks["upper_le_closed"] = upper.le(closed_upper)
    return ChainBounds(j, main_lo, main_hi, middle, tail, lower, upper, closed_middle, closed_upper, checks, info)


def lk_bounds(spec: CremerMapSpec, k: BigCount, x):
    """(lower, upper) on |L_k a(x)| in log scale; the lower bound is 0 unless k = k_j applies."""
    x = coerce_point(spec, x)
    upper = LogScaleReal(0)
    if k.log.sign == 0:
        return LogScaleReal(0), upper
    two = LogScaleReal.exact_pow2(1)
    for lv in spec.levels():
        xv = x[spec.index(lv.j)].mag()
        if xv == 0:
            continue
        # term = |lambda^{k m} - 1| (2j|x|)^m <= min(k |lambda^m - 1|, 2) (2j|x|)^m, and |lambda^m - 1| = M^-m
        base = log2_int_pow(2 * lv.j, 1) * _ls_upper(xv)
        pow_m = LogScaleReal(1, base.log2_hi * lv.m, base.log2_hi * lv.m)
        k_chord = k.log / (lv.log_M ** lv.m)
        factor = two if k_chord.log2_hi >= 1 else LogScaleReal(1, k_chord.log2_hi, k_chord.log2_hi)
        upper = upper + factor * pow_m
    if not spec.toy:
        upper = upper + spec.extension_bound() * k.log
    lower = LogScaleReal(0)
    for lv in spec.levels():
        if lv.k == k:
            try:
                ch = lemma_chain(spec, lv.j, x)
            except (BadInput, PrecisionExhausted):
                continue
            if ch.checks["in_range"] and ch.lower.sign > 0:
                lower, upper = ch.lower, ch.upper
            break
    return lower, upper


_CONDITIONS = ("C1 (levels > j)", "C2 (level j)", "C3", "C4 (level j)", "C5 (level j)")


def escape_certificate(spec: CremerMapSpec, point, domain: DomainCxU, direction: str = "fwd") -> EscapeCertificate:
    """Smallest certified level j with max|x| <= j, |x_[j]| >= 1/j and j > d; ESCAPED if the chain proves it."""
    if direction not in ("fwd", "bwd", "forward", "backward"):
        raise BadInput("direction must be fwd or bwd")
    backward = direction in ("bwd", "backward")
    dname = "backward" if backward else "forward"
    x, _y = point if isinstance(point, tuple) else (point, 0)
    x = coerce_point(spec, x)
    d = domain.diameter
    if all(v.re.is_exact() and v.im.is_exact() and v.mag() == 0 for v in x):
        return EscapeCertificate(None, None, dname, None, None, d, FIXED_CURVE, toy=spec.toy)
    if spec.toy:
        return toy_escape(spec, x, domain, dname)
    if not spec.certified:
        raise InsufficientDepth("the seed does not certify; no level can be used")
    view = spec.inverse_view() if backward else spec
    xs = [view.lam.conj() * v for v in x] if backward else x
    best_needed = None
    for j in range(1, spec.J + 1):
        xj = xs[spec.index(j)]
        if not j > d:
            continue
        if not all(v.mag() <= j for v in xs):
            continue
        if not mpq(xj.mig()) * j >= 1:
            best_needed = best_needed or j
            continue
        ch = lemma_chain(view, j, xs)
        lo = ch.lower
        if ch.ok and lo.sign > 0 and lo.gt(LogScaleReal.from_value(mpq(d))):
            return EscapeCertificate(j, spec.level(j).k, dname, lo, ch.upper, d, ESCAPED, _CONDITIONS, chain=ch)
    big = max(float(v.mag()) for v in x)
    # j >= max|x|, j > d and j |x_[j]| >= 1
    need = max(math.ceil(big), math.floor(d) + 1)
    small = min(float(x[spec.index(j)].mig()) for j in range(1, spec.J + 1))
    if small > 0:
        need = max(need, math.ceil(1 / small))
    raise InsufficientDepth(
        f"no certified level j <= {spec.J} has max|x| <= j, |x_[j]| >= 1/j and j > d = {d}; "
        f"level {need} would be needed", needed_level=need)


def toy_escape(spec: CremerMapSpec, x, domain: DomainCxU, dname: str, k_max: int = 10**5) -> EscapeCertificate:
    """Illustrative: the first k with |L_k a(x)| > d in value-mode ball arithmetic."""
    view = spec.inverse_view() if dname == "backward" else spec
    xs = [view.lam.conj() * v for v in x] if dname == "backward" else x
    d = domain.diameter
    dq = LogScaleReal.from_value(mpq(d))
    for k in range(1, k_max + 1):
        v = eval_Lk(view, k, xs).enclosure()
        lo = v.mig()
        if lo > 0 and LogScaleReal.from_value(lo).gt(dq):
            hi = v.mag()
            return EscapeCertificate(None, BigCount(k), dname, LogScaleReal.from_value(lo),
                                     LogScaleReal(1, log2_bounds(hi)[0], log2_bounds(hi)[1]), d, ESCAPED,
                                     ("toy: value-mode evaluation, constants not certified",), toy=True)
    return EscapeCertificate(None, None, dname, None, None, d, NOT_ESCAPED, toy=True)


def stepwise_exit(spec: CremerMapSpec, xs, ys, domain: DomainCxU, direction: str = "fwd", budget: int = 10**5):
    """Float orbits of F (or F^{-1}) for n = 1: the first step leaving C x U, -1 if none within budget."""
    import numpy as np

    from .. import _kernels

    if spec.n != 1:
        raise BadInput("stepwise_exit is implemented for n = 1")
    lam = complex(spec.lam)
    coefs, degs = [], []
    for lv in spec.levels():
        if lv.lazy:
            raise BadInput("stepwise iteration needs every level materialized")
        coefs.append(complex(float(lv.coeff.mid), 0.0))
        degs.append(lv.m)
    coefs = np.array(coefs, dtype=np.complex128)
    degs = np.array(degs, dtype=np.int64)
    x0 = np.asarray(xs, dtype=np.complex128)
    y0 = np.asarray(ys, dtype=np.complex128)
    if direction in ("bwd", "backward"):
        lam = lam.conjugate()
        coefs = -coefs
        x0 = x0 * lam
    return _kernels.toy_exit(lam, coefs, degs, x0, y0, complex(domain.center), float(domain.radius), int(budget))
