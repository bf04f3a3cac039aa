"""Independent re-verification of (C1)-(C5) from the angle and the raw sequences."""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpfr

from ..errors import PrecisionExhausted, RootOfUnity
from ..numerics.ball import BallReal, mpfr_to_str
from ..numerics.logscale import BigCount, LogScaleReal
from ..numerics.ops import lam_pow, pow_int
from ..rotations.angle import RotationNumber
from ..rotations.smalldiv import divisor_bounds
from .forge import SeedSequences, c2_rhs, log2_int_pow

PASS, FAIL, UNDECIDED = "PASS", "FAIL", "UNDECIDED"
CONDITIONS = ("C1", "C2", "C3", "C4", "C5")


@dataclass(frozen=True)
class Verdict:
    j: int
    condition: str
    status: str
    method: str
    witness: dict = field(default_factory=dict)


@dataclass
class CertReport:
    direction: str
    verdicts: list
    chords: dict = field(default_factory=dict)  # j -> LogScaleReal bounds on |lambda^{m_j} - 1|
    max_prec_used: int = 0

    @property
    def all_pass(self) -> bool:
        return bool(self.verdicts) and all(v.status == PASS for v in self.verdicts)

    def get(self, j: int, cond: str) -> Verdict:
        for v in self.verdicts:
            if v.j == j and v.condition == cond:
                return v
        raise KeyError((j, cond))

    def failures(self) -> list:
        return [v for v in self.verdicts if v.status != PASS]

    def pattern(self) -> list:
        return [(v.j, v.condition, v.status) for v in self.verdicts]

    def to_json(self) -> dict:
        return {
            "direction": self.direction,
            "all_pass": self.all_pass,
            "max_prec_used": self.max_prec_used,
            "verdicts": [
                {"level": v.j, "condition": v.condition, "status": v.status, "method": v.method,
                 "witness": v.witness}
                for v in self.verdicts
            ],
        }


def lin_pow2_sign(c: int, E: int, d: int) -> int:
    """Sign of c * 2^E + d for exact integers, without forming 2^E when E is huge."""
    if c == 0:
        return (d > 0) - (d < 0)
    if E <= 1 << 16:
        v = c * (1 << E) + d
        return (v > 0) - (v < 0)
    # |c| 2^E > |d| as soon as E exceeds the bit length of d
    return 1 if c > 0 else -1


def _tri(b) -> str:
    return PASS if b is True else FAIL if b is False else UNDECIDED


def _log_json(x: LogScaleReal) -> dict:
    return {"log2_lo": _qstr(x.log2_lo), "log2_hi": _qstr(x.log2_hi)}


def _qstr(q) -> str:
    return mpfr_to_str(mpfr(q, 64))


def _tail_info(theta: RotationNumber, m: int):
    """(q_prev, next quotient, interval_only) when m is a convergent denominator, else None."""
    n = theta.convergent_index(m)
    if n is None:
        return None
    conv = theta.convergents(n) if n else []
    q_prev = conv[-2][1] if n > 1 else (1 if n == 1 else 0)
    a = theta.quotient(n + 1)
    if a is None:
        return None
    after = theta.quotient(n + 2)
    interval_only = isinstance(a, BigCount) or (after is None and not theta.terminal)
    return q_prev, a, interval_only


def _check_c1(theta, j, m, prec, max_prec):
    target = log2_int_pow(4 * j * j, m).reciprocal()  # (4 j^2)^{-m}
    p = prec
    while True:
        db = divisor_bounds(theta, m, p)
        ok = db.log_chord.le(target)
        if ok is not None or p >= max_prec or db.route == "convergent":
            w = {"chord": _log_json(db.log_chord), "bound": _log_json(target), "route": db.route}
            if db.M is not None:
                w["M_lo"] = mpfr_to_str(db.M.lower())
                w["M_hi"] = mpfr_to_str(db.M.upper())
            return Verdict(j, "C1", _tri(ok), f"log-scale ({db.route})", w), db, p
        p = min(2 * p, max_prec)


def _check_c2(j, m, prev):
    rhs = c2_rhs(j, prev)
    if isinstance(rhs, int) and m <= 10**6:
        ok = (1 << m) >= rhs
        return Verdict(j, "C2", _tri(ok), "exact integer", {"lhs_log2": str(m), "rhs": str(rhs)})
    rl = rhs if isinstance(rhs, LogScaleReal) else LogScaleReal.from_value(rhs)
    ok = LogScaleReal.exact_pow2(m).ge(rl)
    return Verdict(j, "C2", _tri(ok), "log-scale", {"lhs_log2": str(m), "rhs": _log_json(rl)})


def _check_c3(j, lv, prev_lv):
    if prev_lv is None:
        return Verdict(j, "C3", PASS, "vacuous", {"note": "first level"})
    lhs = min(lv.m, lv.r)
    rhs = max(prev_lv.m, prev_lv.r)
    return Verdict(j, "C3", _tri(lhs > rhs), "exact integer", {"min": str(lhs), "max_prev": str(rhs)})


def _interval_status(lower: bool, upper: bool, below: bool) -> str:
    # sufficient for PASS; FAIL only when k delta < 1/6 for every continuation
    if lower and upper:
        return PASS
    return FAIL if below else UNDECIDED


def _check_c4_interval(j, m, k: BigCount, q_prev, a):
    """k delta in [1/6, 1/3) from delta in (1/(m(a+1)+q_prev), 1/(m a + q_prev))."""
    if k.materialized and not isinstance(a, BigCount):
        kv = k.value
        lower = 6 * kv >= m * (a + 1) + q_prev
        upper = 3 * kv < m * a + q_prev
        below = 6 * kv < m * a + q_prev
        w = {"k_lower_ok": lower, "k_upper_ok": upper}
        return Verdict(j, "C4", _interval_status(lower, upper, below), "interval k*delta in [1/6,1/3)", w)
    if not isinstance(a, BigCount):
        return Verdict(j, "C4", UNDECIDED, "interval", {"note": "lazy k with a materialized next quotient"})
    ae = a.expr
    if ae.A != 1 or ae.B != 0 or ae.D != 1:
        return Verdict(j, "C4", UNDECIDED, "interval", {"note": "next quotient is not a power of two"})
    if k.materialized:
        # a huge next quotient against an explicit k: k delta < k / (m 2^E) is tiny
        kv = k.value
        below = lin_pow2_sign(m, ae.E, q_prev - 6 * kv) > 0
        return Verdict(j, "C4", FAIL if below else UNDECIDED, "interval",
                       {"k_bits": str(kv.bit_length()), "next_quotient": str(ae)})
    ke = k.expr
    if ke.E != ae.E:
        return Verdict(j, "C4", UNDECIDED, "interval", {"note": "exponents differ"})
    A, E, B, D = ke.A, ke.E, ke.B, ke.D
    # 6k >= 6(A 2^E + B)/D >= m(2^E + 1) + q_prev
    lower = lin_pow2_sign(6 * A - D * m, E, 6 * B - D * (m + q_prev)) >= 0
    # 3k <= 3(A 2^E + B + D - 1)/D < m 2^E + q_prev
    upper = lin_pow2_sign(D * m - 3 * A, E, D * q_prev - 3 * (B + D - 1)) > 0
    # 6k <= 6(A 2^E + B + D - 1)/D < m 2^E + q_prev
    below = lin_pow2_sign(D * m - 6 * A, E, D * q_prev - 6 * (B + D - 1)) > 0
    return Verdict(j, "C4", _interval_status(lower, upper, below), "interval k*delta in [1/6,1/3) (lazy)",
                   {"k": str(ke), "next_quotient": str(ae), "k_lower_ok": lower, "k_upper_ok": upper})


def _check_c4_power(theta, j, m, k: BigCount, prec, max_prec):
    kv = k.value
    # radius grows like k^2 2^-p and the margin can be as small as 1/k
    p = min(max(prec, 3 * kv.bit_length() + 64), max_prec)
    while True:
        w = pow_int(lam_pow(theta, m, p), kv, p)
        v = abs(w - 1)
        ok = v.ge(1)
        if ok is not None or p >= max_prec:
            return Verdict(j, "C4", _tri(ok), "pow_int",
                           {"abs_lo": mpfr_to_str(v.lower()), "abs_hi": mpfr_to_str(v.upper()), "prec": p}), p
        p = min(2 * p, max_prec)


def _check_c5(j, k: BigCount, r: int):
    if k.materialized:
        ok = r >= 1 and k.value.bit_length() <= r - 1  # k < 2^(r-1)
        return Verdict(j, "C5", _tri(ok), "exact integer", {"k_bits": str(k.value.bit_length()), "r": str(r)})
    e = k.expr
    s = r - 1 - e.E
    if s > 4096:
        return Verdict(j, "C5", PASS, "symbolic", {"k": str(e), "r": str(r)})
    if s < 0:
        # k >= (A 2^E + B)/D >= 2^{r-1} refutes the condition
        ok = False if r - 1 <= 1 << 16 and lin_pow2_sign(e.A, e.E, e.B - e.D * (1 << max(r - 1, 0))) >= 0 else None
        return Verdict(j, "C5", _tri(ok), "symbolic", {"k": str(e), "r": str(r)})
    # k <= (A 2^E + B + D - 1)/D < 2^{r-1} = 2^s 2^E
    ok = lin_pow2_sign(e.D * (1 << s) - e.A, e.E, -(e.B + e.D - 1)) > 0
    return Verdict(j, "C5", _tri(ok), "symbolic", {"k": str(e), "r": str(r)})


def certify(theta: RotationNumber, seqs: SeedSequences, prec: int = 256, max_prec: int | None = None,
            direction: str = "forward") -> CertReport:
    """Re-verify every condition at every level; verdicts carry the witnesses.

    ``max_prec=None`` allows 4096 bits or whatever the largest explicit k needs.
    """
    if max_prec is None:
        kbits = max((lv.k.value.bit_length() for lv in seqs.levels if lv.k.materialized), default=0)
        max_prec = max(4096, 3 * kbits + 128)
    if not seqs.levels:
        raise ValueError("nothing to certify: empty sequences")
    report = CertReport(direction, [])
    prev_ms = []
    prev_lv = None
    for lv in seqs.levels:
        j, m, k, r = lv.j, lv.m, lv.k, lv.r
        try:
            v1, db, p1 = _check_c1(theta, j, m, prec, max_prec)
            report.chords[j] = db.log_chord
            report.max_prec_used = max(report.max_prec_used, p1)
        except (PrecisionExhausted, RootOfUnity) as exc:
            v1, db = Verdict(j, "C1", UNDECIDED, "log-scale", {"error": str(exc)}), None
        report.verdicts.append(v1)
        report.verdicts.append(_check_c2(j, m, prev_ms))
        report.verdicts.append(_check_c3(j, lv, prev_lv))
        info = _tail_info(theta, m)
        if info is not None and (info[2] or not k.materialized):
            v4 = _check_c4_interval(j, m, k, info[0], info[1])
        elif k.materialized:
            try:
                v4, p4 = _check_c4_power(theta, j, m, k, prec, max_prec)
                report.max_prec_used = max(report.max_prec_used, p4)
            except (PrecisionExhausted, ZeroDivisionError) as exc:
                v4 = Verdict(j, "C4", UNDECIDED, "pow_int", {"error": str(exc)})
            if v4.status == UNDECIDED and info is not None:
                v4 = _check_c4_interval(j, m, k, info[0], info[1])
        else:
            v4 = Verdict(j, "C4", UNDECIDED, "interval", {"note": "m is not a convergent denominator"})
        report.verdicts.append(v4)
        report.verdicts.append(_check_c5(j, k, r))
        prev_ms.append(m)
        prev_lv = lv
    return report


def certify_inverse(theta: RotationNumber, seqs: SeedSequences, prec: int = 256,
                    max_prec: int | None = None) -> CertReport:
    """The same conditions for lambda^{-1}, i.e. the angle 1 - theta."""
    return certify(theta.negated(), seqs, prec, max_prec, direction="inverse")


def chord_ball(report: CertReport, j: int, prec: int = 128) -> BallReal | None:
    c = report.chords.get(j)
    if c is None or not c.representable():
        return None
    return c.to_ball(prec)
