"""Loop-style kernels compiled with numba; same contracts as ``numpy_impl``."""

import numpy as np
from numba import njit


@njit(cache=True)
def frac_dist_scan(theta, n):
    out = np.empty(n, dtype=np.float64)
    for j in range(1, n + 1):
        t = j * theta
        out[j - 1] = abs(t - np.rint(t))
    return out


@njit(cache=True)
def _ipow(z, e):
    # repeated squaring; complex ** int in numba goes through exp/log
    r = 1.0 + 0.0j
    while e:
        if e & 1:
            r *= z
        z *= z
        e >>= 1
    return r


@njit(cache=True)
def _eval_one(coef, exps, comp, dim, z, val, jac):
    for i in range(dim):
        val[i] = 0.0
        for l in range(dim):
            jac[i, l] = 0.0
    for t in range(coef.shape[0]):
        mono = coef[t]
        for i in range(dim):
            e = exps[t, i]
            if e:
                mono *= _ipow(z[i], e)
        val[comp[t]] += mono
        for l in range(dim):
            el = exps[t, l]
            if el == 0:
                continue
            d = coef[t] * el
            for i in range(dim):
                k = exps[t, i] - 1 if i == l else exps[t, i]
                if k:
                    d *= _ipow(z[i], k)
            jac[comp[t], l] += d


@njit(cache=True)
def poly_eval_jac(coef, exps, comp, dim, pts):
    P = pts.shape[0]
    val = np.zeros((P, dim), dtype=np.complex128)
    jac = np.zeros((P, dim, dim), dtype=np.complex128)
    for p in range(P):
        _eval_one(coef, exps, comp, dim, pts[p], val[p], jac[p])
    return val, jac


@njit(cache=True)
def newton_batch(coef, exps, comp, dim, seeds, k, maxit, tol, mu, blowup):
    P = seeds.shape[0]
    pts = seeds.astype(np.complex128).copy()
    status = np.full(P, 2, dtype=np.int64)
    res = np.full(P, np.inf)
    its = np.zeros(P, dtype=np.int64)
    v = np.empty(dim, dtype=np.complex128)
    jf = np.empty((dim, dim), dtype=np.complex128)
    eye = np.eye(dim).astype(np.complex128)
    for p in range(P):
        x = pts[p].copy()
        for it in range(maxit):
            q = x.copy()
            J = eye.copy()
            for _ in range(k):
                _eval_one(coef, exps, comp, dim, q, v, jf)
                J = jf @ J
                q = v.copy()
            G = q - x
            r = np.sqrt(np.sum(np.abs(G) ** 2))
            res[p] = r
            its[p] = it
            if r < tol:
                status[p] = 0
                break
            if not np.isfinite(r) or np.max(np.abs(x)) > blowup:
                status[p] = 1
                break
            A = J - eye
            AH = np.conj(A.T)
            scale = np.max(np.abs(A)) ** 2
            M = AH @ A + (mu * scale + 1e-300) * eye
            step = np.linalg.solve(M, AH @ G)
            x = x - step
        pts[p] = x
    return pts, status, res, its


@njit(cache=True)
def taylor_coeffs(coef, exps, comp, dim, z0, order):
    c = np.zeros((order + 1, dim), dtype=np.complex128)
    c[0] = z0
    T = coef.shape[0]
    prod = np.zeros(order + 1, dtype=np.complex128)
    tmp = np.zeros(order + 1, dtype=np.complex128)
    for k in range(order):
        s = np.zeros(dim, dtype=np.complex128)
        for t in range(T):
            prod[:] = 0.0
            prod[0] = coef[t]
            for i in range(dim):
                for _ in range(exps[t, i]):
                    for a in range(k + 1):
                        acc = 0.0j
                        for b in range(a + 1):
                            acc += prod[b] * c[a - b, i]
                        tmp[a] = acc
                    for a in range(k + 1):
                        prod[a] = tmp[a]
            s[comp[t]] += prod[k]
        for i in range(dim):
            c[k + 1, i] = s[i] / (k + 1)
    return c


@njit(cache=True)
def taylor_flow(coef, exps, comp, dim, z0, t, order, substeps):
    h = t / substeps
    z = z0.astype(np.complex128).copy()
    est = 0.0
    for _ in range(substeps):
        c = taylor_coeffs(coef, exps, comp, dim, z, order)
        hp = 1.0 + 0.0j
        znew = np.zeros(dim, dtype=np.complex128)
        last = 0.0
        for k in range(order + 1):
            for i in range(dim):
                znew[i] += c[k, i] * hp
            if k == order:
                for i in range(dim):
                    last += abs(c[k, i] * hp) ** 2
            hp *= h
        z = znew
        # last Taylor term plus one unit roundoff per substep
        est += np.sqrt(last) + 1.2e-16 * np.sqrt(np.sum(np.abs(znew) ** 2))
    return z, est


@njit(cache=True)
def toy_exit(lam, coefs, degs, x0, y0, center, radius, budget):
    P = x0.shape[0]
    out = np.full(P, -1, dtype=np.int64)
    for p in range(P):
        x = x0[p]
        y = y0[p]
        for s in range(1, budget + 1):
            a = 0.0j
            for i in range(coefs.shape[0]):
                a += coefs[i] * _ipow(x, degs[i])
            y = y + a
            x = x * lam
            if abs(y - center) > radius:
                out[p] = s
                break
    return out
