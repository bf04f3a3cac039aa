import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cremerlab.dynsim import (
    BUDGET_EXHAUSTED, ESCAPED, FINITE, INFINITE, PERIODIC, Domain, Poly, PolyMap, PolyVectorField, eigen_enclosures,
    exp_flow, iterate, jordan_block, jordan_projection, linear_orbit_classify, monomial_drift, parse_polys,
    periodic_points_fixed, st_example,
)
from cremerlab.dynsim.exact import GaussRat, mat_pow
from cremerlab.dynsim.flow import PETAL_POINT
from cremerlab.errors import BadInput

SQ5 = math.sqrt(5)


# -- parsing -------------------------------------------------------------------------------


def test_parse_basic():
    f = PolyMap.parse("x, y + x^2")
    assert f.dim == 2
    assert np.allclose(f(np.array([0.3, 0.1])), [0.3, 0.19])


def test_parse_complex_coefficients_and_names():
    (p,) = parse_polys("2i*z^3 - 1.5", names=("z",))
    assert p(np.array([1.0 + 0j])) == pytest.approx(-1.5 + 2j)
    (q,) = parse_polys("(1+i)*(x - 2)**2", names=("x",))
    assert q(np.array([3.0 + 0j])) == pytest.approx(1 + 1j)


@pytest.mark.parametrize("bad", ["x +", "import os", "x^y", "x^-1", "sin(x)", "x, y; z", "__class__", "w"])
def test_parse_rejects(bad):
    with pytest.raises(BadInput):
        parse_polys(bad, names=("x", "y"))


monos = st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4)),
                        st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False).map(
                            lambda z: complex(round(z.real, 3), round(z.imag, 3))), max_size=6)


@given(monos)
def test_to_str_parse_round_trip(terms):
    p = Poly(terms, 2)
    (q,) = parse_polys(p.to_str(), names=("x", "y"))
    pts = np.array([[0.3 + 0.1j, -0.7j], [1.1, 0.2 + 0.5j]])
    for z in pts:
        assert q(z) == pytest.approx(p(z), rel=1e-12, abs=1e-12)


def test_compose_and_inverse():
    f = PolyMap.parse("x, y + x^2", inverse="x, y - x^2")
    g = PolyMap.parse("x + y^3, y", inverse="x - y^3, y")
    h = f.compose(g)
    pts = np.random.default_rng(1).normal(size=(10, 2)) * 0.5
    assert h.check_inverse(pts)
    for z in pts:
        assert np.allclose(h(z), f(g(z)))
    assert np.allclose(f.power(3)(pts[0]), f(f(f(pts[0]))))


def test_polymap_linear_part():
    f = PolyMap.parse("2*x + y^2, x - y")
    assert np.allclose(f.linear_part(), [[2, 0], [1, -1]])
    assert f.fixes_origin()


# -- orbits ----------------------------------------------------------------------------------


def test_iterate_fixed_line():
    f = PolyMap.parse("x, y + x^2", inverse="x, y - x^2")
    r = iterate(f, (0, 0.5), 1.0, budget=10)
    assert r.termination == PERIODIC and r.period == 1


def test_iterate_escape_closed_form():
    f = PolyMap.parse("x, y + x^2", inverse="x, y - x^2")
    r = iterate(f, (0.3, 0), 1.0, budget=100)
    # y_k = 0.09 k, first above 1 at k = 12
    assert r.termination == ESCAPED and r.step == 12
    for k, p in enumerate(r.points):
        assert p[1].contains(complex(0.09 * k)) or abs(complex(p[1]) - 0.09 * k) < 1e-14
    back = iterate(f, (0.3, 0), 1.0, budget=100, direction="backward")
    assert back.termination == ESCAPED and back.step == 12


def test_iterate_hyperbolic_eigenvector():
    f = PolyMap.parse("x + y, x + 2*y")
    v = np.array([1.0, (1 + SQ5) / 2]) * 0.1
    r = iterate(f, tuple(v), 10.0, budget=100)
    assert r.termination == ESCAPED
    # |F^k v| grows by (3 + sqrt 5)/2 each step
    assert r.step == math.ceil(math.log(10 / (0.1 * (1 + SQ5) / 2)) / math.log((3 + SQ5) / 2))


def test_iterate_budget_and_rotation():
    f = PolyMap.parse(f"{cmath.exp(2j * math.pi * (SQ5 - 1) / 2)}*x")
    r = iterate(f, (0.5,), 1.0, budget=30)
    assert r.termination == BUDGET_EXHAUSTED and len(r.points) == 31


def test_iterate_period_three():
    w = cmath.exp(2j * math.pi / 3)
    f = PolyMap.parse(f"({w.real}+{w.imag}i)*x")
    r = iterate(f, (0.5,), 1.0, budget=30, tol=1e-10)
    assert r.termination == PERIODIC and r.period == 3


@given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
def test_conjugation_invariance(x0, y0):
    # H F H^-1 with H a shear: escape steps agree
    f = PolyMap.parse("x, y + x^2", inverse="x, y - x^2")
    H = PolyMap.parse("x, y + 0.5*x", inverse="x, y - 0.5*x")
    conj = H.compose(f).compose(H.inverted())
    p = np.array([x0, y0])
    a = f.power(5)(p)
    b = H.inverted()(conj.power(5)(H(p)))
    assert np.allclose(a, b, atol=1e-12)


def test_csv_rows():
    f = PolyMap.parse("x, y + x^2")
    r = iterate(f, (0.3, 0), 1.0, budget=100)
    text = r.to_csv(monomials=[(1, 0)])
    head = text.splitlines()[0].split(",")
    assert head == ["step", "re1", "im1", "re2", "im2", "abs_xy", "abs_x^1y^0", "in_domain"]
    assert text.splitlines()[-1].endswith(",0")


def test_domain_validation():
    with pytest.raises(BadInput):
        Domain.around(2, -1)
    with pytest.raises(BadInput):
        iterate(PolyMap.parse("x, y"), (2, 0), 1.0)


# -- linear theory -----------------------------------------------------------------------------


def test_jordan_projection_example():
    got = jordan_projection(1, 2, [1, 0], 5)
    assert got[0].contains(1) and got[1].contains(5)


@given(st.integers(1, 4), st.integers(0, 30), st.sampled_from([1, -1, 1j, GaussRat(3, 4) / 5, GaussRat(1, 1) / 2]))
def test_jordan_projection_vs_exact_power(n, m, lam):
    lam = GaussRat.of(lam) if not isinstance(lam, GaussRat) else lam
    x = [GaussRat(k + 1, -k) for k in range(n)]
    A = mat_pow(jordan_block(lam, n), m)
    want = [sum((A[i][j] * x[j] for j in range(n)), GaussRat(0)) for i in range(n)]
    got = jordan_projection(lam, n, x, m)
    for g, w in zip(got, want):
        assert g.re.contains(w.re) and g.im.contains(w.im)


def test_jordan_kernel_fixed():
    for m in (1, 7, 100):
        got = jordan_projection(1, 3, [0, 0, 2.5], m)
        assert got[2].contains(2.5) and got[0].contains(0) and got[1].contains(0)


def test_jordan_growth_on_unit_circle():
    lam = cmath.exp(2j * math.pi * 0.3)
    vals = [float(abs(jordan_projection(lam, 3, [0, 1, 0], m)[2]).lower()) for m in range(1, 51)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_classify_examples():
    r = linear_orbit_classify([[1, 0], [0, 1]])
    assert r.verdict == FINITE and r.unipotent_power == 1
    r = linear_orbit_classify([[1j, 0], [0, -1]])
    assert r.verdict == FINITE and r.unipotent_power == 4
    r = linear_orbit_classify([[1, 1], [1, 2]])
    assert r.verdict == INFINITE and r.witness["kind"] in ("contracting", "expanding")
    centers = sorted(e.center.real for e in r.eigenvalues)
    assert centers == pytest.approx([(3 - SQ5) / 2, (3 + SQ5) / 2])


def test_classify_unipotent_and_rotation():
    r = linear_orbit_classify([[1, 1], [0, 1]])
    assert r.verdict == FINITE and r.unipotent_power == 1
    r = linear_orbit_classify([[0, -1], [1, -1]])  # order 3
    assert r.verdict == FINITE and r.unipotent_power == 3
    r = linear_orbit_classify([[0.6, -0.8], [0.8, 0.6]])  # rotation by an irrational angle
    assert r.verdict == INFINITE and r.witness["kind"] == "dense-rotation"


def test_classify_rejects_singular():
    with pytest.raises(BadInput):
        linear_orbit_classify([[1, 0], [0, 0]])


def test_eigen_enclosures_count():
    M = [[2, 1, 0], [0, 2, 0], [0, 0, -1]]
    cl = eigen_enclosures(M)
    assert sum(c.mult for c in cl) == 3
    two = [c for c in cl if abs(c.center - 2) < 1e-3]
    assert two and two[0].mult == 2


def test_periodic_points_fixed():
    assert periodic_points_fixed([[0, -1], [1, -1]], 3)["holds"]
    res = periodic_points_fixed([[1j, 0], [0, -1]], 2)
    assert not res["holds"]


# -- flows -------------------------------------------------------------------------------------


def test_flow_zero_field():
    r = exp_flow(PolyVectorField.parse("0, 0"), 1.0, [0.3, 0.4])
    assert np.array_equal(r.z, [0.3, 0.4]) and r.error_estimate == 0


@pytest.mark.parametrize("x0,y0", [(0.1, 0.2), (0.3j, -0.5), (1.0, 0.5j)])
def test_flow_exponential_example(x0, y0):
    X = PolyVectorField.parse("(2*pi*i + y)*x, 0".replace("pi", repr(math.pi)))
    r = exp_flow(X, 1.0, [x0, y0])
    assert abs(r.z[0] - cmath.exp(y0) * x0) < 1e-10 and r.z[1] == y0
    assert r.converged and r.estimate_grade


def test_flow_flower_closed_form():
    z0 = 0.1
    r = exp_flow(PolyVectorField.parse("2i*z^3", names=("z",)), 1.0, [z0])
    want = z0 / cmath.sqrt(1 - 4j * z0 ** 2)
    assert abs(r.z[0] - want) < 1e-13
    assert abs(r.z[0] - want) <= max(r.error_estimate * 100, 1e-15)


def test_flow_substep_doubling_agrees():
    X = PolyVectorField.parse("x^2*y + i*x^3*y^2, -x*y^2 + i*x^2*y^3")
    a = exp_flow(X, 1.0, [0.2, 0.2], scale=8)
    b = exp_flow(X, 1.0, [0.2, 0.2], scale=9)
    assert np.max(np.abs(a.z - b.z)) < 1e-12


def test_flow_validation():
    with pytest.raises(BadInput):
        exp_flow(PolyVectorField.parse("x"), 1.0, [0.1], order=0)
    with pytest.raises(BadInput):
        exp_flow(PolyVectorField.parse("x"), 1.0, [0.1, 0.2])


def test_st_axis_is_periodic():
    r = st_example((0, 0.2), domain=0.3, budget=50, compare=3)
    assert r.orbit.termination == PERIODIC and 4 % r.orbit.step == 0


def test_st_semiconjugacy_residual():
    r = st_example((0.2, 0.2), domain=0.3, budget=40, compare=50)
    assert r.steps_compared == 50
    assert r.semiconj_residual <= max(r.flow_error, 1e-12)


def test_st_escapes_off_axes():
    r = st_example((0.2, 0.2 * cmath.exp(0.5j * math.pi)), domain=0.3, budget=200, compare=2)
    assert r.orbit.termination == ESCAPED and r.orbit.estimate_grade


def test_monomial_drift_on_sector_orbit():
    r = st_example(PETAL_POINT, domain=0.3, budget=50, mode="T", compare=2)
    assert monomial_drift(1, 0, r.orbit)["strictly_increasing"]
    assert monomial_drift(2, 1, r.orbit)["strictly_increasing"]
    same = monomial_drift(1, 1, r.orbit)
    assert not same["asserted"]
    with pytest.raises(BadInput):
        monomial_drift(-1, 0, r.orbit)
