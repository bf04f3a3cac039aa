"""Vectorized numpy versions of the float hot loops."""

import numpy as np


def frac_dist_scan(theta, n):
    """||j theta|| for j = 1..n in double precision."""
    j = np.arange(1, n + 1, dtype=np.float64)
    t = j * theta
    return np.abs(t - np.rint(t))


def poly_eval_jac(coef, exps, comp, dim, pts):
    """Values (P, dim) and Jacobians (P, dim, dim) of a polynomial map at points (P, dim)."""
    P = pts.shape[0]
    val = np.zeros((P, dim), dtype=np.complex128)
    jac = np.zeros((P, dim, dim), dtype=np.complex128)
    for t in range(coef.shape[0]):
        e = exps[t]
        mono = np.full(P, coef[t], dtype=np.complex128)
        for i in range(dim):
            if e[i]:
                mono = mono * pts[:, i] ** e[i]
        val[:, comp[t]] += mono
        for l in range(dim):
            if e[l] == 0:
                continue
            d = np.full(P, coef[t] * e[l], dtype=np.complex128)
            for i in range(dim):
                k = e[i] - 1 if i == l else e[i]
                if k:
                    d = d * pts[:, i] ** k
            jac[:, comp[t], l] += d
    return val, jac


def newton_batch(coef, exps, comp, dim, seeds, k, maxit, tol, mu, blowup):
    """Damped min-norm Newton on F^k(p) - p for every seed.

    Returns (points, status, residual, iterations) with status
    0 converged, 1 diverged, 2 iteration cap.
    """
    p = seeds.astype(np.complex128).copy()
    P = p.shape[0]
    status = np.full(P, 2, dtype=np.int64)
    res = np.full(P, np.inf)
    its = np.zeros(P, dtype=np.int64)
    active = np.ones(P, dtype=bool)
    eye = np.eye(dim, dtype=np.complex128)
    for it in range(maxit):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        q = p[idx]
        J = np.broadcast_to(eye, (idx.size, dim, dim)).copy()
        for _ in range(k):
            v, jf = poly_eval_jac(coef, exps, comp, dim, q)
            J = jf @ J
            q = v
        G = q - p[idx]
        r = np.sqrt(np.sum(np.abs(G) ** 2, axis=1))
        res[idx] = r
        its[idx] = it
        done = r < tol
        status[idx[done]] = 0
        active[idx[done]] = False
        bad = ~np.isfinite(r) | (np.max(np.abs(p[idx]), axis=1) > blowup)
        bad &= ~done
        status[idx[bad]] = 1
        active[idx[bad]] = False
        keep = ~(done | bad)
        if not keep.any():
            continue
        A = J[keep] - eye
        g = G[keep]
        AH = np.conj(np.transpose(A, (0, 2, 1)))
        scale = np.max(np.abs(A), axis=(1, 2)) ** 2
        M = AH @ A + (mu * scale + 1e-300)[:, None, None] * eye
        rhs = (AH @ g[:, :, None])[:, :, 0]
        step = np.linalg.solve(M, rhs[:, :, None])[:, :, 0]
        p[idx[keep]] = p[idx[keep]] - step
    return p, status, res, its


def taylor_coeffs(coef, exps, comp, dim, z0, order):
    """Taylor coefficients c[k] (k = 0..order) of the solution of z' = X(z), z(0) = z0."""
    c = np.zeros((order + 1, dim), dtype=np.complex128)
    c[0] = z0
    T = coef.shape[0]
    maxe = exps.max() if T else 0
    for k in range(order):
        # series of z truncated at degree k; k-th coefficient of X(z(t))
        s = np.zeros(dim, dtype=np.complex128)
        for t in range(T):
            prod = np.zeros(k + 1, dtype=np.complex128)
            prod[0] = coef[t]
            for i in range(dim):
                for _ in range(exps[t, i]):
                    prod = np.convolve(prod, c[: k + 1, i])[: k + 1]
            s[comp[t]] += prod[k]
        c[k + 1] = s / (k + 1)
    return c


def taylor_flow(coef, exps, comp, dim, z0, t, order, substeps):
    """Compose ``substeps`` Taylor steps of size t/substeps; returns (z, last-term estimate)."""
    h = t / substeps
    z = np.asarray(z0, dtype=np.complex128).copy()
    est = 0.0
    hp = h ** np.arange(order + 1)
    for _ in range(substeps):
        c = taylor_coeffs(coef, exps, comp, dim, z, order)
        terms = c * hp[:, None]
        z = terms.sum(axis=0)
        # last Taylor term plus one unit roundoff per substep
        est += np.sqrt(np.sum(np.abs(terms[order]) ** 2)) + 1.2e-16 * np.sqrt(np.sum(np.abs(z) ** 2))
    return z, est


def toy_exit(lam, coefs, degs, x0, y0, center, radius, budget):
    """First step s <= budget with |y_s - center| > radius (or -1) for n = 1 toy maps."""
    x = np.asarray(x0, dtype=np.complex128).copy()
    y = np.asarray(y0, dtype=np.complex128).copy()
    out = np.full(x.shape[0], -1, dtype=np.int64)
    alive = np.ones(x.shape[0], dtype=bool)
    for s in range(1, budget + 1):
        a = np.zeros_like(x)
        for c, d in zip(coefs, degs):
            a += c * x ** d
        y = y + a
        x = x * lam
        gone = alive & (np.abs(y - center) > radius)
        out[gone] = s
        alive &= ~gone
        if not alive.any():
            break
    return out
