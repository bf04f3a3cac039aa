"""Small divisors of a rotation: Omega, omega, Bruno/Poschel sums, Cremer profiles."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from .. import _kernels
from ..errors import BadInput, PrecisionExhausted, RootOfUnity, UndecidedMin
from ..numerics.ball import BallReal, mpfr_to_str
from ..numerics.logscale import LogScaleReal
from ..numerics.ops import _frac_interval, chord, frac_dist
from .angle import RotationNumber, delta_convergent_log

# above this many candidates the float scan is replaced by the best-approximation argument
SCAN_LIMIT = 1 << 24


def _dist_q(theta: RotationNumber, j: int, bits: int):
    """Exact rational bounds on ||j theta||."""
    lo, hi = theta.enclosure(bits + j.bit_length())
    r = _frac_interval(lo * j, hi * j)
    if r is None:
        raise PrecisionExhausted(f"cannot locate {j} theta relative to the integers")
    return r[2], r[3]


def _argmin_exact(theta, cands, prec):
    """Index and rational bounds of the smallest ||j theta|| over candidate j's."""
    for bits in (prec + 32, 2 * prec + 64):
        vals = [(j, *_dist_q(theta, j, bits)) for j in cands]
        best = min(vals, key=lambda v: v[2])
        rivals = [v for v in vals if v[0] != best[0] and v[1] <= best[2]]
        # equal exact values are a genuine tie (rational angles), not an ambiguity
        rivals = [v for v in rivals if not (v[1] == v[2] == best[1] == best[2])]
        if not rivals:
            return best
    raise UndecidedMin(
        f"candidates {best[0]} and {rivals[0][0]} cannot be separated",
        indices=(best[0], rivals[0][0]),
    )


def min_frac_dist(theta: RotationNumber, N: int, prec: int = 128, method: str = "scan"):
    """(j*, lo, hi): the minimizer of ||j theta|| over 1 <= j <= N and rational bounds on the minimum."""
    if N < 1:
        raise BadInput("need N >= 1")
    if method == "brute":
        return _argmin_exact(theta, range(1, N + 1), prec)
    if method == "convergent" or (method == "scan" and N > SCAN_LIMIT):
        return _min_by_convergents(theta, N, prec)
    if method != "scan":
        raise BadInput(f"unknown method {method!r}")
    lo, hi = theta.enclosure(80)
    tf = float((lo + hi) / 2)
    d = _kernels.frac_dist_scan(tf, N)
    # |d_j - ||j theta||| <= j * 2^-51 covers the rounding of theta and of j * theta
    err = np.arange(1, N + 1, dtype=np.float64) * 2.0 ** -51 + 2.0 ** -60
    bound = np.min(d + err)
    cands = np.nonzero(d - err <= bound)[0] + 1
    return _argmin_exact(theta, [int(j) for j in cands], prec)


def _min_by_convergents(theta, N, prec):
    # the minimum of ||j theta|| over j <= N sits at the largest convergent denominator <= N
    q_prev, q = 0, 1
    i = 0
    while True:
        a = theta.quotient(i + 1)
        if a is None:
            break
        if not isinstance(a, int):
            break
        nq = a * q + q_prev
        if nq > N:
            break
        q_prev, q = q, nq
        i += 1
    lo, hi = _dist_q(theta, q, prec + 32)
    if lo == 0 and hi == 0:
        return q, lo, hi
    return q, lo, hi


def _chord_from_q(lo, hi, prec) -> BallReal:
    return chord(BallReal.from_rational_interval(lo, hi, prec + 16)).with_prec(prec)


def small_divisor_Omega(theta: RotationNumber, m: int, prec: int = 128, method: str = "scan") -> BallReal:
    """min_{2<=k<=m} |lambda^k - lambda| = 2 sin(pi min_{1<=j<=m-1} ||j theta||)."""
    if m < 2:
        raise BadInput("Omega needs m >= 2")
    _, lo, hi = min_frac_dist(theta, m - 1, prec, method)
    return _chord_from_q(lo, hi, prec)


def poschel_omega(theta: RotationNumber, m: int, prec: int = 128, method: str = "scan") -> BallReal:
    """min over 2<=k<=m of |lambda^k - lambda| and |lambda^k - 1| (indices j = 1..m)."""
    if m < 2:
        raise BadInput("omega needs m >= 2")
    _, lo, hi = min_frac_dist(theta, m, prec, method)
    return _chord_from_q(lo, hi, prec)


def _neglog(b: BallReal):
    """(log(1/b), infinite flag)."""
    if b.contains_zero() or b.lower() <= 0:
        return None, True
    return -b.log(), False


def _partials(theta, K, prec, which, method, strict):
    f = small_divisor_Omega if which == "bruno" else poschel_omega
    out, total, infinite = [], BallReal(0, 0, prec), False
    for k in range(1, K + 1):
        w = f(theta, 2 ** (k + 1), prec, method)
        t, inf = _neglog(w)
        if inf:
            if strict:
                raise RootOfUnity(f"small divisor at m = {2 ** (k + 1)} contains 0")
            infinite = True
        if not infinite:
            total = total + t.mul_2exp(-k)
        out.append(PartialSum(k, None if infinite else total, infinite))
    return out


@dataclass(frozen=True)
class PartialSum:
    K: int
    value: BallReal | None
    infinite: bool = False


def bruno_partials(theta, K, prec=128, method="scan", strict=False) -> list:
    """Partial sums sum_{k<=K} 2^-k log(1/Omega(2^{k+1})) for K = 1..K."""
    return _partials(theta, K, prec, "bruno", method, strict)


def poschel_partials(theta, K, prec=128, method="scan", strict=False) -> list:
    """Same dyadic sum with omega in place of Omega."""
    return _partials(theta, K, prec, "poschel", method, strict)


def bruno_partial_sum(theta: RotationNumber, K: int, prec: int = 128, method: str = "scan") -> BallReal:
    if K < 1:
        raise BadInput("K >= 1")
    return bruno_partials(theta, K, prec, method, strict=True)[-1].value


def poschel_partial_sum(theta: RotationNumber, K: int, prec: int = 128, method: str = "scan") -> BallReal:
    if K < 1:
        raise BadInput("K >= 1")
    return poschel_partials(theta, K, prec, method, strict=True)[-1].value


def bruno_convergent_sum(theta: RotationNumber, K: int, prec: int = 128) -> BallReal:
    """Variant sum_{k<K} log(q_{k+1}) / q_k over convergent denominators (q_0 = 1)."""
    qs = [1] + [q for _, q in theta.convergents(K)]
    total = BallReal(0, 0, prec)
    for a, b in zip(qs[:-1], qs[1:]):
        total = total + BallReal(b, 0, prec).log() / a
    return total


@dataclass(frozen=True)
class CremerEntry:
    m: int
    value: BallReal
    root_of_unity: bool = False


def cremer_witness(theta: RotationNumber, m: int, prec: int = 128) -> CremerEntry:
    """|lambda^m - 1|^{1/m}, switching to log-scale bounds when ||m theta|| underflows."""
    if m < 1:
        raise BadInput("m >= 1")
    try:
        if m.bit_length() > 64:
            raise PrecisionExhausted("use the log-scale route")
        d, side = frac_dist(theta, m, prec)
    except PrecisionExhausted:
        return _cremer_witness_log(theta, m, prec)
    if side == 0:
        return CremerEntry(m, BallReal(0, 0, prec), True)
    c = chord(d)
    if c.lower() <= 0:
        raise RootOfUnity(f"|lambda^{m} - 1| cannot be separated from 0")
    v = (c.log() / m).exp() if m > 1 else c
    return CremerEntry(m, v, False)


def chord_log(delta: LogScaleReal) -> LogScaleReal:
    """Log-scale bounds on 2 sin(pi delta) for 0 < delta < 2^-8."""
    if delta.log2_hi > -8:
        raise BadInput("log-scale chord needs a tiny argument")
    two_pi = LogScaleReal.from_value(BallReal.pi(128) * 2)
    upper = two_pi * delta
    # sin x >= x (1 - x^2/6) >= x / 2 for tiny x; a 1-bit loss on the lower side is plenty
    return LogScaleReal(1, upper.log2_lo - 1, upper.log2_hi)


@dataclass(frozen=True)
class DivisorBounds:
    """||m theta||, |lambda^m - 1| and M = |lambda^m - 1|^{-1/m} in ball and log-scale form."""

    m: int
    log_delta: LogScaleReal
    log_chord: LogScaleReal
    log_M: LogScaleReal
    delta: BallReal | None = None
    chord: BallReal | None = None
    M: BallReal | None = None
    route: str = "direct"


def divisor_bounds(theta: RotationNumber, m: int, prec: int = 256) -> DivisorBounds:
    """Bounds valid for every continuation of theta's known expansion.

    Uses the exact enclosure of theta when it resolves ||m theta||, and otherwise
    the convergent identity ||q_n theta|| = 1/(q_n x_{n+1} + q_{n-1}).
    """
    m = int(m)
    d = None
    if m.bit_length() <= 4096:
        try:
            d, side = frac_dist(theta, m, prec)
            if side == 0:
                raise RootOfUnity(f"lambda^{m} = 1")
        except PrecisionExhausted:
            d = None
    if d is not None:
        c = chord(d)
        lc = LogScaleReal.from_value(c)
        log_m = LogScaleReal(1, -lc.log2_hi / m, -lc.log2_lo / m)
        M = (-(c.log() / m)).exp()
        return DivisorBounds(m, LogScaleReal.from_value(d), lc, log_m, d, c, M, "direct")
    n = theta.convergent_index(m)
    if n is None:
        raise PrecisionExhausted(f"||{m} theta|| is not resolvable from the known expansion")
    ld = delta_convergent_log(theta, n)
    if ld.log2_hi <= -8:
        lc = chord_log(ld)
        dball = ld.to_ball(prec) if ld.representable() else None
        cball = lc.to_ball(prec) if lc.representable() else None
    else:
        dball = ld.to_ball(prec)
        cball = chord(dball)
        lc = LogScaleReal.from_value(cball)
    log_m = LogScaleReal(1, -lc.log2_hi / m, -lc.log2_lo / m)
    M = log_m.to_ball(prec) if log_m.representable() else None
    return DivisorBounds(m, ld, lc, log_m, dball, cball, M, "convergent")


def _cremer_witness_log(theta, m, prec):
    n = theta.convergent_index(m)
    if n is None:
        raise PrecisionExhausted(f"m = {m} is neither resolvable directly nor a convergent denominator")
    c = chord_log(delta_convergent_log(theta, n))
    root = c.scale_log(mpq(1, m))
    return CremerEntry(m, root.to_ball(prec), False)


def cremer_profile(theta: RotationNumber, m_list, prec: int = 128) -> list:
    return [cremer_witness(theta, int(m), prec) for m in m_list]


@dataclass
class ArithProfile:
    omega_values: list = field(default_factory=list)
    poschel_omega_values: list = field(default_factory=list)
    bruno_partials: list = field(default_factory=list)
    poschel_partials: list = field(default_factory=list)
    cremer_witnesses: list = field(default_factory=list)

    def to_json(self) -> dict:
        def ball(b):
            if b is None:
                return {"lo": None, "hi": None, "infinite": True}
            return {"lo": mpfr_to_str(b.lower()), "hi": mpfr_to_str(b.upper()), "infinite": False}

        return {
            "omega": [{"m": m, "omega_lo": ball(v)["lo"], "omega_hi": ball(v)["hi"]} for m, v in self.omega_values],
            "poschel_omega": [
                {"m": m, "omega_lo": ball(v)["lo"], "omega_hi": ball(v)["hi"]} for m, v in self.poschel_omega_values
            ],
            "bruno_partials": [{"K": p.K, **ball(p.value)} for p in self.bruno_partials],
            "poschel_partials": [{"K": p.K, **ball(p.value)} for p in self.poschel_partials],
            "cremer": [
                {"m": str(e.m), "value_lo": ball(e.value)["lo"], "value_hi": ball(e.value)["hi"],
                 "root_of_unity": e.root_of_unity}
                for e in self.cremer_witnesses
            ],
        }


def arith_profile(theta: RotationNumber, K: int, prec: int = 128, omega_ms=(), cremer_ms=(), method="scan"):
    prof = ArithProfile()
    for m in omega_ms:
        prof.omega_values.append((m, small_divisor_Omega(theta, m, prec, method)))
        prof.poschel_omega_values.append((m, poschel_omega(theta, m, prec, method)))
    if K:
        prof.bruno_partials = bruno_partials(theta, K, prec, method)
        prof.poschel_partials = poschel_partials(theta, K, prec, method)
    prof.cremer_witnesses = cremer_profile(theta, cremer_ms, prec)
    return prof
