from fractions import Fraction

import gmpy2
import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cremerlab.errors import LazyExponent
from cremerlab.numerics import BallComplex, BallReal, BigCount, CeilExpr, LogScaleReal
from cremerlab.numerics.logscale import qceil, qfloor
from cremerlab.numerics.ops import chord, circle, frac_dist, pow_int

fracs = st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6)
pos = st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=10**6)
small = st.fractions(min_value=-4, max_value=4, max_denominator=1000)


def ball(q: Fraction, prec=64):
    return BallReal.from_interval(q, q, prec)


def mp_in(b: BallReal, x) -> bool:
    """x (an mpmath number) lies in b; endpoints are converted exactly."""
    lo, hi = (Fraction(*map(int, e.as_integer_ratio())) for e in (b.lower(), b.upper()))
    with mp.workprec(max(mp.mp.prec, 4 * b.prec)):
        return mp.mpf(lo.numerator) / lo.denominator <= x <= mp.mpf(hi.numerator) / hi.denominator


@given(fracs, fracs)
def test_add_sub_mul_contain_exact(a, b):
    A, B = ball(a), ball(b)
    assert (A + B).contains(a + b)
    assert (A - B).contains(a - b)
    assert (A * B).contains(a * b)


@given(fracs, pos)
def test_div_contains_exact(a, b):
    assert (ball(a) / ball(b)).contains(a / b)


@given(small, st.integers(0, 12))
def test_pow_contains_exact(a, k):
    assert (ball(a) ** k).contains(a ** k)


@given(fracs, fracs, st.fractions(0, 1, max_denominator=100))
def test_inclusion_monotone(a, b, r):
    # a wider input ball gives a wider output ball
    A, B = ball(a), ball(b)
    wide = A + BallReal(0, r, 64)
    assert (wide * B).contains(A * B)
    assert (wide + B).contains(A + B)


@pytest.mark.parametrize("fn", ["sqrt", "exp", "log", "sin", "cos"])
@given(x=pos)
def test_elementary_vs_mpmath(fn, x):
    if fn == "exp" and x > 100:
        x = x / 100
    mp.mp.prec = 300
    want = getattr(mp, fn)(mp.mpf(x.numerator) / x.denominator)
    got = getattr(ball(x, 128), fn)()
    assert mp_in(got, want)


def test_pi_and_ln2():
    mp.mp.prec = 400
    assert mp_in(BallReal.pi(256), mp.pi)
    assert mp_in(BallReal.ln2(256), mp.log(2))


def test_radius_is_small_for_exact_input():
    b = BallReal.pi(200) * 3
    assert b.rad < gmpy2.mpfr(2) ** -190


def test_negative_radius_rejected():
    with pytest.raises(ValueError):
        BallReal(1, -1)


def test_comparisons_three_valued():
    a, b = BallReal(1, 0.1), BallReal(2, 0.1)
    assert a.lt(b) is True and b.lt(a) is False
    assert BallReal(1, 1).lt(BallReal(1.5, 1)) is None


@given(st.floats(-2, 2, allow_nan=False), st.floats(-2, 2, allow_nan=False),
       st.floats(-2, 2, allow_nan=False), st.floats(-2, 2, allow_nan=False))
def test_complex_ops_contain_float_result(a, b, c, d):
    z, w = BallComplex.from_complex(complex(a, b)), BallComplex.from_complex(complex(c, d))
    # floats are dyadic, so the exact product is a Fraction
    re = Fraction(a) * Fraction(c) - Fraction(b) * Fraction(d)
    im = Fraction(a) * Fraction(d) + Fraction(b) * Fraction(c)
    p = z * w
    assert p.re.contains(re) and p.im.contains(im)


@given(st.integers(0, 3000))
def test_pow_int_on_unit_circle(k):
    mp.mp.prec = 200
    t = Fraction(1, 7)
    z = circle(BallReal.from_interval(t, t, 128))
    got = pow_int(z, k, 128)
    want = mp.expj(2 * mp.pi * k / mp.mpf(7))
    assert mp_in(got.re, want.real) and mp_in(got.im, want.imag)


@given(st.fractions(0, Fraction(1, 2), max_denominator=1000))
def test_chord(d):
    mp.mp.prec = 200
    want = 2 * mp.sin(mp.pi * mp.mpf(d.numerator) / d.denominator)
    assert mp_in(chord(BallReal.from_interval(d, d, 128)), want)


@given(fracs)
def test_qceil_qfloor(x):
    assert qceil(gmpy2.mpq(x.numerator, x.denominator)) == -((-x.numerator) // x.denominator)
    assert qfloor(gmpy2.mpq(x.numerator, x.denominator)) == x.numerator // x.denominator


@given(pos, pos)
def test_logscale_mul_div(a, b):
    A, B = LogScaleReal.from_value(gmpy2.mpq(a.numerator, a.denominator)), \
        LogScaleReal.from_value(gmpy2.mpq(b.numerator, b.denominator))
    mp.mp.prec = 200
    for res, want in ((A * B, a * b), (A / B, a / b)):
        w = mp.log(mp.mpf(want.numerator) / want.denominator, 2)
        assert mp.mpf(res.log2_lo.numerator) / res.log2_lo.denominator <= w
        assert w <= mp.mpf(res.log2_hi.numerator) / res.log2_hi.denominator


@given(pos, pos)
def test_logscale_add_sub(a, b):
    A = LogScaleReal.from_value(gmpy2.mpq(a.numerator, a.denominator))
    B = LogScaleReal.from_value(gmpy2.mpq(b.numerator, b.denominator))
    mp.mp.prec = 200

    def inside(res, want):
        w = mp.log(mp.mpf(want.numerator) / want.denominator, 2)
        return (mp.mpf(res.log2_lo.numerator) / res.log2_lo.denominator <= w
                <= mp.mpf(res.log2_hi.numerator) / res.log2_hi.denominator)

    assert inside(A + B, a + b)
    if a > 2 * b:
        assert inside(A - B, a - b)


def test_logscale_huge_exponents_compare():
    big = LogScaleReal.exact_pow2(10**400)
    bigger = LogScaleReal.exact_pow2(10**400 + 1)
    assert big.lt(bigger) is True
    assert (big * bigger).log2_lo == 2 * 10**400 + 1


@given(st.integers(1, 10**6), st.integers(0, 200), st.integers(-1000, 1000), st.integers(1, 10**4))
def test_ceil_expr_materialize(A, E, B, D):
    if A * 2 ** E + B <= 0:
        return
    e = CeilExpr(A, E, B, D)
    v = e.materialize(1 << 12)
    assert v == -((-(A * 2 ** E + B)) // D)
    assert CeilExpr.parse(str(e)) == e
    lo, hi = e.log2_bounds()
    mp.mp.prec = 400
    w = mp.log(mp.mpf(v), 2)
    assert mp.mpf(lo.numerator) / lo.denominator <= w <= mp.mpf(hi.numerator) / hi.denominator


def test_lazy_count_refuses_value():
    c = BigCount.lazy(CeilExpr(3, 10**6, 1, 7))
    assert not c.materialized
    with pytest.raises(LazyExponent):
        c.value
    assert c.log.log2_lo > 10**6 - 2
    assert BigCount.from_json(c.to_json()) == c


@given(st.integers(1, 10**9))
def test_frac_dist_against_fraction(k):
    from cremerlab.rotations import RotationNumber

    theta = RotationNumber.from_fraction(Fraction(355, 1130))
    d, _side = frac_dist(theta, k, 128)
    t = (k * Fraction(355, 1130)) % 1
    assert d.contains(min(t, 1 - t))


def test_json_round_trip():
    b = BallReal.pi(256)
    assert BallReal.from_json(b.to_json()).contains(b)
    z = BallComplex(BallReal.pi(128), BallReal.ln2(128))
    assert BallComplex.from_json(z.to_json()).contains(z)
