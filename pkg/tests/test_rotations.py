from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cremerlab.errors import BadInput, RootOfUnity
from cremerlab.numerics.ops import frac_dist
from cremerlab.rotations import (
    RotationNumber, bruno_partial_sum, bruno_partials, cremer_witness, divisor_bounds, min_frac_dist,
    poschel_omega, poschel_partials, small_divisor_Omega,
)

# mpmath, 300 bits, computed before the implementation was exercised
GOLDEN_OMEGA_5 = 0.8849419630926520389
GOLDEN_POSCHEL_5 = 0.5590075226463456203
GOLDEN_DIST_1 = 0.3819660112501051518
GOLDEN_DIST_3 = 0.1458980337503154554
GOLDEN_FRAC_2THETA = 0.2360679774997896964
GOLDEN_BRUNO = {1: 0.061116607275474213849, 6: 0.6708101376173683742, 10: 0.74210425283639281316,
                20: 0.74953685963617272788}

golden = RotationNumber.golden()


def _close(ball, x, slack=1e-15):
    return float(ball.lower()) - slack <= x <= float(ball.upper()) + slack


def test_finite_expansion_convergents():
    assert RotationNumber.from_fraction(Fraction(1, 3)).convergents(1) == [(1, 3)]
    assert RotationNumber.from_fraction(Fraction(1, 3)).convergents(5) == [(1, 3)]


def test_golden_denominators_are_fibonacci():
    assert [q for _, q in golden.convergents(5)] == [1, 2, 3, 5, 8]


def test_two_fifty():
    assert RotationNumber.from_quotients([2, 50], tail="terminal").convergents(2)[-1] == (50, 101)


@given(st.integers(2, 10**6), st.lists(st.integers(1, 10**6), max_size=11))
def test_convergent_recurrence_and_approximation(a1, rest):
    qs = [a1] + rest
    theta = RotationNumber.from_quotients(qs, tail="terminal")
    conv = theta.convergents(len(qs))
    exact = Fraction(0)
    for a in reversed(qs):
        exact = 1 / (a + exact)
    p0, q0, p1, q1 = 1, 0, 0, 1
    for a, (p, q) in zip(qs, conv):
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        assert (p, q) == (p1, q1)
        assert abs(exact - Fraction(p, q)) <= Fraction(1, q * q)
    qseq = [q for _, q in conv]
    assert all(a < b for a, b in zip(qseq, qseq[1:]))
    assert conv[-1] == (exact.numerator, exact.denominator)


def test_frac_dist_examples():
    d, _ = frac_dist(RotationNumber.from_fraction(Fraction(1, 3)), 3)
    assert d.is_exact() and d.contains(0)
    d, side = frac_dist(golden, 3)
    assert _close(d, GOLDEN_DIST_3) and side == -1
    d, _ = frac_dist(golden, 1)
    assert _close(d, GOLDEN_DIST_1)


def test_omega_examples():
    # m = 2: the single candidate |lambda^2 - lambda| = |lambda - 1| = 2 sin(pi ||theta||)
    mp.mp.prec = 200
    assert _close(small_divisor_Omega(golden, 2), float(2 * mp.sin(mp.pi * GOLDEN_DIST_1)), 1e-14)
    assert _close(small_divisor_Omega(RotationNumber.from_fraction(Fraction(1, 4)), 4), 2 ** 0.5)
    assert _close(small_divisor_Omega(golden, 5), GOLDEN_OMEGA_5)
    assert _close(poschel_omega(golden, 5), GOLDEN_POSCHEL_5)
    assert poschel_omega(golden, 5).upper() <= small_divisor_Omega(golden, 5).upper()


def test_poschel_omega_root_of_unity_is_zero():
    w = poschel_omega(RotationNumber.from_fraction(Fraction(1, 4)), 4)
    assert w.contains_zero()


def test_omega_needs_m_ge_2():
    with pytest.raises(BadInput):
        small_divisor_Omega(golden, 1)


@pytest.mark.parametrize("theta", [golden, RotationNumber.from_quotients([3, 1, 4, 1, 5, 9, 2, 6], tail="open")])
def test_omega_nonincreasing_and_brute_force_agrees(theta):
    prev_O, prev_w = None, None
    for m in range(2, 51):
        O = small_divisor_Omega(theta, m)
        w = poschel_omega(theta, m)
        _, lo, hi = min_frac_dist(theta, m - 1, method="brute")
        assert O.overlaps(small_divisor_Omega(theta, m, method="brute"))
        assert w.lower() <= O.upper()
        if prev_O is not None:
            assert O.lower() <= prev_O.upper() and w.lower() <= prev_w.upper()
        prev_O, prev_w = O, w


def test_bruno_partials_golden():
    ps = bruno_partials(golden, 20)
    for K, want in GOLDEN_BRUNO.items():
        assert _close(ps[K - 1].value, want)
    vals = [float(p.value.upper()) for p in ps]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert ps[0].value.overlaps(small_divisor_Omega(golden, 4).log().__neg__().mul_2exp(-1))


def test_bruno_nested_under_precision():
    lo = bruno_partial_sum(golden, 8, prec=128)
    hi = bruno_partial_sum(golden, 8, prec=256)
    assert lo.contains(hi)


def test_poschel_partials_dominate():
    b = bruno_partials(golden, 8)
    p = poschel_partials(golden, 8)
    assert all(x.value.lower() <= y.value.upper() for x, y in zip(b, p))


def test_rational_angle_partials_report_infinity():
    ps = bruno_partials(RotationNumber.from_fraction(Fraction(1, 3)), 3)
    assert all(p.infinite for p in ps)
    with pytest.raises(RootOfUnity):
        bruno_partial_sum(RotationNumber.from_fraction(Fraction(1, 3)), 2)


def test_cremer_witness():
    e = cremer_witness(RotationNumber.from_fraction(Fraction(1, 2)), 2)
    assert e.root_of_unity and e.value.contains(0)
    for m in (2, 3, 5, 8, 13):
        assert float(cremer_witness(golden, m).value.lower()) >= 0.5


def test_cremer_witness_forged(forged):
    theta, seqs = forged
    m2 = seqs.levels[1].m
    # (C1) is tight here: the value is 1/16 - 1.9e-42, so 128 bits cannot decide it
    assert cremer_witness(theta, m2, prec=256).value.upper() <= Fraction(1, 16)


@given(st.fractions(Fraction(1, 997), Fraction(996, 997), max_denominator=997))
def test_rational_angles_hit_zero_at_denominator(t):
    theta = RotationNumber.from_fraction(t)
    assert cremer_witness(theta, t.denominator).root_of_unity


def test_power_angle():
    assert float(golden.power_angle(1)) == pytest.approx(float(golden), abs=1e-15)
    assert float(golden.power_angle(2)) == pytest.approx(GOLDEN_FRAC_2THETA, abs=1e-15)


def test_power_angle_omega_inequality():
    sq = golden.power_angle(2)
    for m in range(2, 21):
        assert small_divisor_Omega(sq, m).upper() >= small_divisor_Omega(golden, 2 * m - 1).lower()


def test_divisor_bounds_direct_and_convergent(forged):
    theta, seqs = forged
    b1 = divisor_bounds(theta, 2)
    assert b1.route == "direct"
    assert b1.delta.overlaps(abs(b1.delta)) and _close(b1.delta, 1 / 101, 1e-12)
    m3 = seqs.levels[2].m
    b3 = divisor_bounds(theta, m3)
    # |lambda^m - 1| <= (4 j^2)^-m, i.e. log2 M >= log2(36) at j = 3
    assert b3.log_M.log2_lo >= Fraction(51699, 10000)  # log2(36) = 5.169925...


def test_mpmath_crosscheck_random_angles():
    mp.mp.prec = 200
    theta = RotationNumber.from_quotients([1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12], tail="terminal")
    exact = Fraction(0)
    for a in reversed(range(1, 13)):
        exact = 1 / (a + exact)
    t = mp.mpf(exact.numerator) / exact.denominator
    for m in (2, 7, 30):
        want = min(2 * mp.sin(mp.pi * abs(j * t - mp.nint(j * t))) for j in range(1, m))
        assert _close(small_divisor_Omega(theta, m), float(want))
