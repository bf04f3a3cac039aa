"""Co-construction of a Cremer angle and the certified level data (m_j, M_j, k_j, r_j)."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from gmpy2 import mpq

from ..errors import BadInput, DepthInfeasible, PrecisionExhausted, UndecidedBoundary
from ..numerics.ball import BallReal, up
from ..numerics.logscale import BigCount, CeilExpr, LogScaleReal, _log2_bounds_int, qceil
from ..numerics.ops import frac_dist
from ..rotations.angle import RotationNumber
from ..rotations.smalldiv import divisor_bounds

T_STAR = Fraction(1, 6)


@dataclass(frozen=True)
class ForgePolicy:
    target_depth: int = 3
    materialize_depth: int = 2
    first_quotient: int = 2
    c1_margin: Fraction = Fraction(1)
    c4_threshold: Fraction = T_STAR
    prec: int = 256
    lazy_base: int = 2
    bit_budget: int = 1 << 20
    lazy_slack_bits: int = 2

    def __post_init__(self):
        if self.target_depth < 0:
            raise BadInput("target_depth must be >= 0")
        if not 0 <= self.materialize_depth <= max(self.target_depth, 0):
            raise BadInput("materialize_depth must lie in [0, target_depth]")
        if self.first_quotient < 2:
            raise BadInput("first_quotient must be >= 2 so that m_1 = a_1 >= 2")
        if self.c1_margin < 1:
            raise BadInput("c1_margin must be >= 1")
        if self.c4_threshold != T_STAR:
            raise BadInput("only the threshold 1/6 (2 sin(pi/6) = 1) is supported")
        if self.lazy_base != 2:
            raise BadInput("lazy quotients are powers of two")
        if self.prec < 64:
            raise BadInput("prec must be >= 64")


@dataclass
class SeedLevel:
    j: int
    m: int
    k: BigCount
    r: int
    lazy: bool
    M: BallReal | None = None  # |lambda^m - 1|^{-1/m} when representable
    log2_M: LogScaleReal | None = None  # log2 of M's magnitude bounds, always present
    delta: BallReal | None = None  # ||m theta||
    log2_delta: LogScaleReal | None = None
    cert: dict = field(default_factory=dict)


@dataclass
class SeedSequences:
    levels: list
    materialized_depth: int

    def __len__(self):
        return len(self.levels)

    @property
    def m(self):
        return [lv.m for lv in self.levels]

    @property
    def r(self):
        return [lv.r for lv in self.levels]

    @property
    def k(self):
        return [lv.k for lv in self.levels]

    def level(self, j: int) -> SeedLevel:
        return self.levels[j - 1]


def ceil_log2(k: int) -> int:
    return (k - 1).bit_length() if k > 0 else 0


def log2_int_pow(base: int, m: int) -> LogScaleReal:
    """Bounds on log2(base^m) accurate enough to survive the factor m."""
    lo, hi = _log2_bounds_int(base, prec=int(m).bit_length() + 96)
    return LogScaleReal(1, lo * m, hi * m)


def pi_upper(bits: int = 128) -> mpq:
    return mpq(up(bits).const_pi())


def c2_rhs(j: int, ms: list) -> int | LogScaleReal:
    """1 + j + sum_{l<j} 2 (2l)^{m_l} j^{m_l}, exact when every m_l is small."""
    if all(m <= 10**6 for m in ms):
        return 1 + j + sum(2 * (2 * l * j) ** m for l, m in enumerate(ms, start=1))
    total = LogScaleReal.from_value(1 + j)
    for l, m in enumerate(ms, start=1):
        total = total + log2_int_pow(2 * l * j, m) * LogScaleReal.from_value(2)
    return total


def c2_holds(j: int, m: int, prev_ms: list):
    rhs = c2_rhs(j, prev_ms)
    if isinstance(rhs, int) and m <= 10**6:
        return (1 << m) >= rhs
    rhs_l = rhs if isinstance(rhs, LogScaleReal) else LogScaleReal.from_value(rhs)
    return LogScaleReal.exact_pow2(m).ge(rhs_l)


def _required_denominator(j: int, m: int, margin: Fraction) -> int:
    """An integer U >= 1/delta_req, where delta_req = asin((4j^2)^{-m}/2)/pi; uses asin(x) >= x."""
    u = 2 * pi_upper() * (4 * j * j) ** m * mpq(margin.numerator, margin.denominator)
    return qceil(u)


def _required_exponent(j: int, m: int, q: int, margin: Fraction, slack: int) -> int:
    """Smallest E (plus slack) with q 2^E >= 2 pi margin (4j^2)^m, by directed-rounding log bounds."""
    need = log2_int_pow(4 * j * j, m) * LogScaleReal.from_value(2 * pi_upper()) \
        * LogScaleReal.from_value(mpq(margin.numerator, margin.denominator))
    lo_q, _ = _log2_bounds_int(q)
    e = need.log2_hi - lo_q
    return max(qceil(e) + slack, 1)


def tail_robust_k(q: int, q_prev: int, a) -> BigCount:
    """ceil((q (a+1) + q_prev) / 6): k delta >= 1/6 for every continuation after a."""
    if isinstance(a, BigCount):
        e = a.expr
        if not (e.A == 1 and e.B == 0 and e.D == 1):
            raise BadInput("lazy quotient must be a power of two")
        return BigCount.lazy(CeilExpr(q, e.E, q + q_prev, 6))
    n = q * (a + 1) + q_prev
    return BigCount(-(-n // 6))


def r_from_k(k: BigCount) -> int:
    """ceil(log2 k) + 2 computed exactly, also for lazy k = ceil((q 2^E + B)/6)."""
    if k.materialized:
        return ceil_log2(k.value) + 2
    e = k.expr
    # smallest t with 6 * 2^t >= A 2^E + B; valid when 2^E >= B so t = E + s with 6*2^s > A
    if e.D != 6 or e.B < 0 or e.B.bit_length() >= e.E:
        raise BadInput("unsupported lazy count shape")
    s = 0
    while 6 * (1 << s) <= e.A:
        s += 1
    return e.E + s + 2


def minimal_escape_multiplier(theta: RotationNumber, m: int, prec: int = 256, bumps: int = 3) -> BigCount:
    """Least k (up to certified bumps) with ||k m theta|| >= 1/6."""
    n = theta.convergent_index(m) if m > 1 else None
    nxt = theta.quotient(n + 1) if n is not None else None
    if isinstance(nxt, BigCount):
        conv = theta.convergents(n)
        q_prev = conv[-2][1] if n > 1 else 1
        return tail_robust_k(m, q_prev, nxt)
    d, side = frac_dist(theta, m, prec)
    sixth = BallReal(1, 0, prec) / 6
    if side != 0 and d.ge(sixth):
        return BigCount(1)
    if side == 0:
        raise BadInput("m theta is an integer: lambda^m = 1")
    k = max(qceil((sixth / d).lower()), 1)
    # the estimate is only good to k 2^-prec; redo it with room for the size of k
    p2 = prec + k.bit_length() + 64
    d, _ = frac_dist(theta, m, p2)
    sixth = BallReal(1, 0, p2) / 6
    k = max(qceil((sixth / d).lower()), 1)
    used, p = 0, p2
    while True:
        try:
            dd, _ = frac_dist(theta, k * m, p)
            ok = dd.ge(BallReal(1, 0, p) / 6)
        except PrecisionExhausted:
            ok = None
        if ok:
            return BigCount(k)
        if ok is None:
            # undecided at this precision: retry sharper before giving up
            used += 1
            if used > bumps:
                break
            p *= 2
            continue
        k += 1
    raise UndecidedBoundary(f"k delta straddles 1/6 near k = {k}")


def forge(policy: ForgePolicy | None = None):
    """Build (theta, SeedSequences) level by level; see ForgePolicy for the knobs."""
    policy = policy or ForgePolicy()
    J = policy.target_depth
    if J == 0:
        return RotationNumber.golden(), SeedSequences([], 0)
    quotients = [policy.first_quotient]
    q_prev, q = 1, policy.first_quotient  # q_0, q_1
    ms, rs_upper = [], []
    n = 1
    for j in range(1, J + 1):
        # fill with quotients 1 until m_j = q_n meets the growth conditions
        while True:
            ok_c3 = not ms or q > max(ms[-1], rs_upper[-1])
            ok_c2 = c2_holds(j, q, ms) is True
            if ok_c2 and ok_c3:
                break
            quotients.append(1)
            q_prev, q = q, q + q_prev
            n += 1
        m = q
        lazy = j > policy.materialize_depth
        if lazy:
            E = _required_exponent(j, m, q, policy.c1_margin, policy.lazy_slack_bits)
            a = BigCount.lazy(CeilExpr(1, E, 0, 1))
        else:
            est_bits = m * (4 * j * j).bit_length()
            if est_bits > policy.bit_budget + 64:
                raise DepthInfeasible(
                    f"level {j} needs a partial quotient of about {est_bits} bits, "
                    f"over the {policy.bit_budget}-bit budget; lower materialize_depth"
                )
            U = _required_denominator(j, m, policy.c1_margin)
            a = max(-(-(U - q_prev) // q), 1)
            if a.bit_length() > policy.bit_budget or (a * q).bit_length() > policy.bit_budget:
                raise DepthInfeasible(
                    f"level {j} needs a partial quotient of about {a.bit_length()} bits, "
                    f"over the {policy.bit_budget}-bit budget; lower materialize_depth"
                )
        ms.append(m)
        if j < J:
            if isinstance(a, BigCount):
                if a.expr.E > policy.bit_budget:
                    raise DepthInfeasible(
                        f"level {j + 1} would need m = q of about 2^{a.expr.E} bits; "
                        f"only the last level may be lazy at this budget"
                    )
                a = a.expr.materialize(policy.bit_budget)
            q_next = a * q + q_prev
            # r_j <= ceil(log2 ceil((q_{n+1} + q_n)/6)) + 2 whatever the tail is
            rs_upper.append(ceil_log2(-(-(q_next + q) // 6)) + 2)
            quotients.append(a)
            q_prev, q = q, q_next
            n += 1
        else:
            quotients.append(a)
    theta = RotationNumber(quotients, name="")
    levels = _derive_levels(theta, ms, policy)
    return theta, SeedSequences(levels, policy.materialize_depth)


def _derive_levels(theta: RotationNumber, ms: list, policy: ForgePolicy) -> list:
    levels = []
    J = len(ms)
    for j, m in enumerate(ms, start=1):
        lazy = j > policy.materialize_depth
        n = theta.convergent_index(m)
        nxt = theta.quotient(n + 1)
        if j == J or isinstance(nxt, BigCount):
            conv = theta.convergents(n)
            q_prev = conv[-2][1] if n > 1 else 1
            k = tail_robust_k(m, q_prev, nxt)
        else:
            k = minimal_escape_multiplier(theta, m, policy.prec)
        if lazy and k.materialized:
            k = BigCount(k.value)
        r = r_from_k(k)
        lv = SeedLevel(j=j, m=m, k=k, r=r, lazy=lazy)
        _fill_magnitudes(theta, lv, policy.prec)
        levels.append(lv)
    return levels


def _fill_magnitudes(theta, lv: SeedLevel, prec: int):
    """delta, M and their log2 bounds, falling back to log scale for unrepresentable sizes."""
    db = divisor_bounds(theta, lv.m, prec)
    lv.delta, lv.log2_delta = db.delta, db.log_delta
    lv.log2_M = db.log_M
    lv.M = db.M


def tamper(seqs: SeedSequences, j: int, **changes) -> SeedSequences:
    """Copy of the sequences with fields of level j replaced (for negative tests)."""
    levels = [replace(lv) for lv in seqs.levels]
    lv = levels[j - 1]
    for key, val in changes.items():
        if key == "k" and not isinstance(val, BigCount):
            val = BigCount(val)
        setattr(lv, key, val)
    return SeedSequences(levels, seqs.materialized_depth)
