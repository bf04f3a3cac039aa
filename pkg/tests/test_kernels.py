import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cremerlab import _kernels
from cremerlab.dynsim.poly import PolyMap, PolyVectorField

nb = pytest.importorskip("cremerlab._kernels.numba_impl")
npk = _kernels._load("numpy")

cplx = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False)


def _same(a, b, rel=1e-9):
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and np.all(np.abs(a - b) <= rel * np.maximum(1.0, np.abs(a)))


@given(st.floats(0.001, 0.999), st.integers(1, 2000))
def test_frac_dist_scan_agrees(theta, n):
    assert _same(nb.frac_dist_scan(theta, n), npk.frac_dist_scan(theta, n), 1e-12)


@given(st.lists(st.tuples(cplx, cplx), min_size=1, max_size=20))
def test_poly_eval_jac_agrees(pts):
    f = PolyMap.parse("y + 0.5*x^3, -0.3*x + 1.2 - y^2 + 0.1i*x*y^3").arrays
    P = np.array(pts, dtype=np.complex128)
    v1, j1 = nb.poly_eval_jac(f.coef, f.exps, f.comp, f.dim, P)
    v2, j2 = npk.poly_eval_jac(f.coef, f.exps, f.comp, f.dim, P)
    assert _same(v1, v2) and _same(j1, j2)


def test_poly_eval_jac_vs_finite_difference():
    f = PolyMap.parse("x*y^2 + 2, x^3 - i*y").arrays
    p = np.array([[0.3 + 0.2j, -0.4 + 0.1j]])
    _, J = _kernels.poly_eval_jac(f.coef, f.exps, f.comp, f.dim, p)
    h = 1e-7
    for i in range(2):
        e = np.zeros((1, 2), dtype=np.complex128)
        e[0, i] = h
        vp, _ = _kernels.poly_eval_jac(f.coef, f.exps, f.comp, f.dim, p + e)
        vm, _ = _kernels.poly_eval_jac(f.coef, f.exps, f.comp, f.dim, p - e)
        assert np.allclose((vp - vm)[0] / (2 * h), J[0][:, i], atol=1e-6)


def test_newton_batch_agrees():
    f = PolyMap.parse("-x, -x - y").arrays
    seeds = np.random.default_rng(2).normal(size=(50, 2)) * 0.5 + 0j
    a = nb.newton_batch(f.coef, f.exps, f.comp, f.dim, seeds, 2, 60, 1e-20, 1e-12, 1e12)
    b = npk.newton_batch(f.coef, f.exps, f.comp, f.dim, seeds, 2, 60, 1e-20, 1e-12, 1e12)
    assert _same(a[0], b[0], 1e-8)
    assert np.all(np.abs(a[0][:, 0]) < 1e-10)


@given(cplx, cplx, st.integers(2, 12))
def test_taylor_agrees(x0, y0, order):
    X = PolyVectorField.parse("x^2*y + i*x^3*y^2, -x*y^2 + i*x^2*y^3").arrays
    z0 = np.array([x0, y0], dtype=np.complex128) * 0.2
    assert _same(nb.taylor_coeffs(X.coef, X.exps, X.comp, X.dim, z0, order),
                 npk.taylor_coeffs(X.coef, X.exps, X.comp, X.dim, z0, order))
    z1, e1 = nb.taylor_flow(X.coef, X.exps, X.comp, X.dim, z0, 1.0 + 0j, order, 16)
    z2, e2 = npk.taylor_flow(X.coef, X.exps, X.comp, X.dim, z0, 1.0 + 0j, order, 16)
    assert _same(z1, z2) and _same(e1, e2, 1e-6)


def test_taylor_coeffs_exponential():
    # z' = z: c_k = 1/k!
    X = PolyVectorField.parse("z", names=("z",)).arrays
    c = _kernels.taylor_coeffs(X.coef, X.exps, X.comp, X.dim, np.array([1.0 + 0j]), 6)
    assert np.allclose(c[:, 0], [1, 1, 1 / 2, 1 / 6, 1 / 24, 1 / 120, 1 / 720])


def test_toy_exit_agrees():
    lam = np.exp(2j * np.pi * (np.sqrt(5) - 1) / 2)
    xs = np.exp(2j * np.pi * np.linspace(0, 1, 64, endpoint=False)) * 0.9
    args = (lam, np.array([0.25, 1e-3], dtype=np.complex128), np.array([2, 4], dtype=np.int64), xs,
            np.zeros_like(xs), 0j, 0.4, 500)
    assert np.array_equal(nb.toy_exit(*args), npk.toy_exit(*args))


def test_use_switches_backend():
    prev = _kernels.use("numpy")
    try:
        assert _kernels.backend == "numpy" and _kernels.frac_dist_scan is npk.frac_dist_scan
        with pytest.raises(ValueError):
            _kernels.use("fortran")
    finally:
        _kernels.use(prev)


@pytest.mark.parametrize("flag,want", [("numpy", "numpy"), ("numba", "numba")])
def test_env_flag_selects_backend(flag, want):
    env = dict(os.environ, CREMERLAB_KERNELS=flag)
    out = subprocess.run([sys.executable, "-c", "from cremerlab import _kernels; print(_kernels.backend)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == want
