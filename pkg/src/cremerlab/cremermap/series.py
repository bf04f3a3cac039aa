"""The map F(x, y) = (lambda x, y + a(x)) with a(x) = sum_j (2j/M_j)^{m_j} x_[j]^{m_j}."""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Integral

import gmpy2
from gmpy2 import mpfr

from ..errors import BadInput, InsufficientDepth, LazyExponent, LazyLevel, PrecisionExhausted
from ..numerics.ball import BallComplex, BallReal, _ccoerce
from ..numerics.logscale import BigCount, LogScaleReal, as_count, log2_bounds
from ..numerics.ops import lam_pow, lam_pow_minus_one_rel
from ..rotations.angle import RotationNumber
from ..rotations.smalldiv import divisor_bounds
from ..seedforge.certify import certify, certify_inverse
from ..seedforge.forge import ForgePolicy, SeedLevel, SeedSequences, forge, log2_int_pow

# below this the tail is replaced by the (valid, looser) bound 2^-_TAIL_FLOOR when enclosing
_TAIL_FLOOR = 1 << 24


def _ls_range(lo, hi) -> LogScaleReal:
    """log-scale enclosure of a positive quantity known to lie in [lo, hi]."""
    if hi == 0:
        return LogScaleReal(0)
    if lo <= 0:
        raise ValueError("lower bound must be positive")
    return LogScaleReal(1, log2_bounds(lo)[0], log2_bounds(hi)[1])


def _ls_upper(hi) -> LogScaleReal:
    """log-scale upper bound only (lower end set equal; use for sums of upper bounds)."""
    if hi == 0:
        return LogScaleReal(0)
    u = log2_bounds(hi)[1]
    return LogScaleReal(1, u, u)


@dataclass
class LevelData:
    j: int
    m: int
    k: BigCount
    r: int
    lazy: bool
    log_M: LogScaleReal
    chord: BallReal | None = None  # |lambda^m - 1|
    coeff: BallReal | None = None  # a_j = (2j)^m |lambda^m - 1| = (2j/M_j)^m
    mu_minus_one: BallComplex | None = None  # lambda^m - 1, relative precision


@dataclass
class SeriesValue:
    """partial (materialized levels) plus a rigorous bound on every omitted level."""

    partial: BallComplex
    tail: LogScaleReal

    def tail_upper(self):
        if self.tail.sign == 0:
            return mpfr(0)
        e = self.tail.log2_hi
        if e < -_TAIL_FLOOR:
            e = -_TAIL_FLOOR
        if e > _TAIL_FLOOR:
            raise PrecisionExhausted("tail bound too large to enclose")
        from ..numerics.ball import up
        return up(64).exp2(up(64).add(mpfr(0), e))

    def enclosure(self) -> BallComplex:
        t = self.tail_upper()
        return self.partial if t == 0 else self.partial.inflate(t)

    def contains(self, z) -> bool:
        return self.enclosure().contains(z)

    def overlaps(self, other) -> bool:
        other = other.enclosure() if isinstance(other, SeriesValue) else other
        return self.enclosure().overlaps(other)

    def __complex__(self):
        return complex(self.partial)


class CremerMapSpec:
    """Dimension n, angle theta and seed levels; fully determines F.

    Levels beyond the seed are accounted for through the bound that (C1) and (C3)
    give for any continuation, valid while every |x_i| <= J + 1.
    ``toy=True`` marks an illustrative map whose constants are not certified;
    its series is the finite polynomial of its own levels.
    """

    def __init__(self, theta: RotationNumber, seeds: SeedSequences, n: int = 1, prec: int = 256,
                 toy: bool = False, name: str = ""):
        if n < 1:
            raise BadInput("dimension n must be >= 1")
        if not seeds.levels:
            raise BadInput("a map needs at least one seed level")
        ms = [lv.m for lv in seeds.levels]
        if len(set(ms)) != len(ms):
            raise BadInput("monomial degrees m_j must be distinct")
        self.theta = theta
        self.seeds = seeds
        self.n = n
        self.prec = prec
        self.toy = toy
        self.name = name
        self._levels = None
        self._certs = None
        self._lam = None

    # -- construction helpers ------------------------------------------------------
    @classmethod
    def forged(cls, depth: int = 3, materialize: int = 2, n: int = 1, prec: int = 256) -> "CremerMapSpec":
        theta, seeds = forge(ForgePolicy(depth, materialize))
        return cls(theta, seeds, n=n, prec=prec)

    @classmethod
    def toy_map(cls, J: int = 3, n: int = 1, prec: int = 128, k_max: int = 10**5) -> "CremerMapSpec":
        """Golden angle, m_j = 2j, M_j = |lambda^{m_j} - 1|^{-1/m_j}; not a certified construction."""
        from ..numerics.ops import frac_dist

        theta = RotationNumber.golden()
        levels = []
        sixth = BallReal(1, 0, prec) / 6
        for j in range(1, J + 1):
            m = 2 * j
            for k in range(1, k_max + 1):
                if frac_dist(theta, k * m, prec)[0].ge(sixth):
                    break
            else:
                raise BadInput(f"no toy multiplier below {k_max} at level {j}")
            r = (k - 1).bit_length() + 2
            levels.append(SeedLevel(j=j, m=m, k=BigCount(k), r=r, lazy=False))
        return cls(theta, SeedSequences(levels, J), n=n, prec=prec, toy=True, name="toy")

    # -- derived data ------------------------------------------------------------------
    @property
    def J(self) -> int:
        return len(self.seeds.levels)

    def index(self, j: int) -> int:
        """0-based coordinate feeding level j (the index [j] minus one)."""
        return (j - 1) % self.n

    @property
    def lam(self) -> BallComplex:
        if self._lam is None:
            self._lam = lam_pow(self.theta, 1, self.prec)
        return self._lam

    def levels(self) -> list:
        if self._levels is None:
            out = []
            for lv in self.seeds.levels:
                db = divisor_bounds(self.theta, lv.m, self.prec)
                d = LevelData(lv.j, lv.m, lv.k, lv.r, lv.lazy, db.log_M)
                if not lv.lazy:
                    d.mu_minus_one = lam_pow_minus_one_rel(self.theta, lv.m, self.prec)
                    d.chord = abs(d.mu_minus_one)
                    d.coeff = BallReal(2 * lv.j, 0, self.prec) ** lv.m * d.chord
                out.append(d)
            self._levels = out
        return self._levels

    def level(self, j: int) -> LevelData:
        if not 1 <= j <= self.J:
            raise BadInput(f"level {j} outside 1..{self.J}")
        return self.levels()[j - 1]

    def certificates(self):
        """(forward, inverse) certification reports, computed once."""
        if self._certs is None:
            self._certs = (certify(self.theta, self.seeds), certify_inverse(self.theta, self.seeds))
        return self._certs

    @property
    def certified(self) -> bool:
        if self.toy:
            return False
        f, i = self.certificates()
        return f.all_pass and i.all_pass

    def inverse_view(self) -> "CremerMapSpec":
        """The same coefficients with lambda replaced by lambda^{-1} (angle 1 - theta)."""
        other = CremerMapSpec(self.theta.negated(), self.seeds, self.n, self.prec, self.toy, self.name)
        if self._certs is not None:
            other._certs = (self._certs[1], self._certs[0])
        return other

    def extension_bound(self) -> LogScaleReal:
        """Bound on all levels beyond the seed: sum_{l > J} 2^{-m_l} <= 2^{-max(m_J, r_J)}."""
        if self.toy:
            return LogScaleReal(0)
        last = self.seeds.levels[-1]
        return LogScaleReal.exact_pow2(-max(last.m, last.r))


def coerce_point(spec: CremerMapSpec, x) -> list:
    if isinstance(x, (BallComplex, complex, float, Integral)) and not isinstance(x, bool):
        x = [x]
    x = [_ccoerce(v if not isinstance(v, float) else complex(v), spec.prec) if not isinstance(v, BallComplex)
         else v for v in x]
    if len(x) != spec.n:
        raise BadInput(f"expected {spec.n} x-coordinates, got {len(x)}")
    return x


def coefficient(spec: CremerMapSpec, j: int) -> BallComplex:
    """a_j as a complex ball (it is real and positive)."""
    lv = spec.level(j)
    if lv.lazy:
        raise LazyLevel(f"level {j} is lazy; only log-scale bounds exist")
    return BallComplex(lv.coeff, BallReal(0, 0, spec.prec))


def _lazy_term_bound(lv: LevelData, xabs_hi) -> LogScaleReal:
    """(2j |x| / M_j)^{m_j} in log scale."""
    if xabs_hi == 0:
        return LogScaleReal(0)
    base = log2_int_pow(2 * lv.j, 1) * _ls_upper(xabs_hi) / lv.log_M
    return LogScaleReal(1, base.log2_lo * lv.m, base.log2_hi * lv.m)


def _tail(spec: CremerMapSpec, x: list) -> LogScaleReal:
    tail = LogScaleReal(0)
    for lv in spec.levels():
        if lv.lazy:
            tail = tail + _lazy_term_bound(lv, x[spec.index(lv.j)].mag())
    if not spec.toy:
        big = max(v.mag() for v in x)
        if big > spec.J + 1:
            need = int(gmpy2.ceil(big)) - 1  # levels 1..J bound the series while |x| <= J + 1
            raise InsufficientDepth(
                f"|x| up to {float(big):.4g} needs seed levels up to {need} to bound the series",
                needed_level=need)
        tail = tail + spec.extension_bound()
    return tail


def eval_a(spec: CremerMapSpec, x) -> SeriesValue:
    x = coerce_point(spec, x)
    partial = BallComplex(0, 0, spec.prec)
    for lv in spec.levels():
        if not lv.lazy:
            partial = partial + x[spec.index(lv.j)] ** lv.m * lv.coeff
    return SeriesValue(partial, _tail(spec, x))


def _geom(spec: CremerMapSpec, lv: LevelData, k: int) -> BallComplex:
    """1 + mu + ... + mu^{k-1} = (mu^k - 1)/(mu - 1) with mu = lambda^m."""
    if k == 0:
        return BallComplex(0, 0, spec.prec)
    if k == 1:
        return BallComplex(1, 0, spec.prec)
    return lam_pow_minus_one_rel(spec.theta, k * lv.m, spec.prec) / lv.mu_minus_one


def eval_Lk(spec: CremerMapSpec, k, x, mode: str = "value"):
    """(L_k a)(x) = a(x) + a(lambda x) + ... + a(lambda^{k-1} x)."""
    if mode == "bound":
        from .escape import lk_bounds

        return lk_bounds(spec, as_count(k), x)
    if mode != "value":
        raise BadInput("mode must be value or bound")
    k = as_count(k)
    if not k.materialized:
        raise LazyExponent("value mode needs a materialized k; use mode='bound'")
    k = k.value
    if k < 0:
        raise BadInput("k must be >= 0")
    x = coerce_point(spec, x)
    if k == 0:
        return SeriesValue(BallComplex(0, 0, spec.prec), LogScaleReal(0))
    partial = BallComplex(0, 0, spec.prec)
    for lv in spec.levels():
        if not lv.lazy:
            partial = partial + _geom(spec, lv, k) * (x[spec.index(lv.j)] ** lv.m * lv.coeff)
    tail = _tail(spec, x)
    # |1 + mu + ... + mu^{k-1}| <= k on every omitted level
    if tail.sign and k > 1:
        tail = tail * LogScaleReal.from_value(k)
    return SeriesValue(partial, tail)


def _split(spec, point):
    x, y = point
    return coerce_point(spec, x), _ccoerce(y if not isinstance(y, float) else complex(y), spec.prec)


def apply_F(spec: CremerMapSpec, point):
    x, y = _split(spec, point)
    a = eval_a(spec, x).enclosure()
    return [spec.lam * v for v in x], y + a


def apply_F_inv(spec: CremerMapSpec, point):
    """F^{-1}(x, y) = (lambda^{-1} x, y - a(lambda^{-1} x))."""
    x, y = _split(spec, point)
    xi = [spec.lam.conj() * v for v in x]
    return xi, y - eval_a(spec, xi).enclosure()


def apply_Fk(spec: CremerMapSpec, k, point):
    """F^k(x, y) = (lambda^k x, y + (L_k a)(x)) in one shot."""
    k = as_count(k)
    if not k.materialized:
        raise LazyExponent("apply_Fk needs a materialized k")
    x, y = _split(spec, point)
    lk = lam_pow(spec.theta, k.value, spec.prec)
    return [lk * v for v in x], y + eval_Lk(spec, k, x).enclosure()


def brute_force_Lk(spec: CremerMapSpec, k: int, x) -> BallComplex:
    """sum_{i<k} a(lambda^i x) by direct evaluation (an independent oracle for L_k)."""
    x = coerce_point(spec, x)
    total = BallComplex(0, 0, spec.prec)
    for i in range(k):
        li = lam_pow(spec.theta, i, spec.prec)
        total = total + eval_a(spec, [li * v for v in x]).enclosure()
    return total


def to_polymap(spec: CremerMapSpec):
    """F truncated to its materialized levels as a float PolyMap on C^{n+1} (y last)."""
    from ..dynsim.poly import Poly, PolyMap

    d = spec.n + 1
    lam = complex(spec.lam)
    comps = [Poly.var(i, d) * lam for i in range(spec.n)]
    y = Poly.var(spec.n, d)
    inv_x = [Poly.var(i, d) * (1 / lam) for i in range(spec.n)]
    a = Poly({}, d)
    a_inv = Poly({}, d)
    for lv in spec.levels():
        if lv.lazy:
            continue
        c = float(lv.coeff.mid)
        i = spec.index(lv.j)
        a = a + Poly.var(i, d) ** lv.m * c
        a_inv = a_inv + (Poly.var(i, d) * (1 / lam)) ** lv.m * c
    return PolyMap(comps + [y + a], inv_x + [y - a_inv], name=spec.name or "F")
