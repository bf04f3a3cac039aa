"""Linear dynamics: Jordan-block iterates in closed form and the finite-orbit classification."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, gcd

import numpy as np

from ..errors import BadInput, OrderBoundExceeded
from ..numerics.ball import BallComplex, BallReal
from .exact import GaussRat, charpoly, is_zero, mat_exact, mat_eye, mat_pow, mat_sub

FINITE = "FINITE"
INFINITE = "INFINITE"


def _cball(z, prec):
    if isinstance(z, BallComplex):
        return z
    if isinstance(z, GaussRat):
        return BallComplex(BallReal(z.re, 0, prec), BallReal(z.im, 0, prec))
    return BallComplex.from_complex(complex(z), prec)


def jordan_projection(lam, n: int, x, m: int, prec: int = 128) -> list:
    """pi_j(F^m x) for the Jordan block (F x)_j = lam x_j + x_{j-1}.

    pi_j(F^m x) = sum_{t < j} C(m, t) lam^{m-t} x_{j-t}; for example
    pi_2 = m lam^{m-1} x_1 + lam^m x_2.
    """
    if n < 1 or len(x) != n:
        raise BadInput("x must have n coordinates")
    if m < 0:
        raise BadInput("m must be >= 0")
    L = _cball(lam, prec)
    xs = [_cball(v, prec) for v in x]
    pw = [L ** (m - t) if t <= m else None for t in range(n)]
    out = []
    for j in range(n):
        acc = BallComplex(0, 0, prec)
        for t in range(min(j, m) + 1):
            acc = acc + xs[j - t] * pw[t] * comb(m, t)
        out.append(acc)
    return out


def jordan_block(lam, n: int) -> list:
    """Exact matrix of the block used by :func:`jordan_projection` (ones below the diagonal)."""
    L = GaussRat.of(lam)
    return [[L if i == j else GaussRat(1) if i == j + 1 else GaussRat(0) for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------------------------
# eigenvalue enclosures


def _poly_eval(coeffs: list, z: BallComplex) -> BallComplex:
    acc = BallComplex(0, 0, z.prec)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


@dataclass
class EigenCluster:
    """Disk holding exactly ``mult`` eigenvalues (with multiplicity)."""

    center: complex
    radius: float
    mult: int

    def ball(self, prec: int = 128) -> BallComplex:
        return BallComplex.from_complex(self.center, prec).inflate(self.radius)

    def to_json(self):
        return {"center": [repr(self.center.real), repr(self.center.imag)], "radius": repr(self.radius),
                "multiplicity": self.mult}


def eigen_enclosures(M, prec: int = 128) -> list:
    """Rigorous disks for the roots of the exact characteristic polynomial.

    Weierstrass corrections W_i = p(z_i) / prod_{j != i}(z_i - z_j) give disks
    D(z_i, n |W_i|); each connected component of their union holds as many roots
    as centers.
    """
    A = mat_exact(M)
    n = len(A)
    cp = charpoly(A)
    cb = [_cball(c, prec) for c in cp]
    z = _separate(np.roots([complex(c) for c in reversed(cp)]))
    zs = [BallComplex.from_complex(complex(v), prec) for v in z]
    rad = []
    for i, zi in enumerate(zs):
        den = BallComplex(1, 0, prec)
        for j, zj in enumerate(zs):
            if j != i:
                den = den * (zi - zj)
        rad.append(float((abs(_poly_eval(cb, zi) / den) * n).upper()) * (1 + 2 ** -40))
    return _components([complex(v) for v in z], rad)


def _separate(z, eps: float = 1e-7):
    """Spread coincident float roots on a small circle so every center is distinct."""
    z = np.array(z, dtype=np.complex128)
    seen = {}
    for i, v in enumerate(z):
        seen.setdefault(complex(v), []).append(i)
    for v, idx in seen.items():
        if len(idx) > 1:
            for t, i in enumerate(idx):
                z[i] = v + eps * max(1.0, abs(v)) * np.exp(2j * np.pi * t / len(idx))
    return z


def _components(centers, radii):
    n = len(centers)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if abs(centers[i] - centers[j]) <= radii[i] + radii[j]:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for idx in groups.values():
        c = sum(centers[i] for i in idx) / len(idx)
        r = max(abs(centers[i] - c) + radii[i] for i in idx)
        out.append(EigenCluster(c, r * (1 + 2 ** -40), len(idx)))
    out.sort(key=lambda e: (round(e.center.real, 12), round(e.center.imag, 12)))
    return out


# ---------------------------------------------------------------------------------------------
# classification


@dataclass
class LinearClassification:
    verdict: str
    eigenvalues: list
    unipotent_power: int | None = None
    witness: dict | None = None
    orders: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "eigenvalues": [e.to_json() for e in self.eigenvalues],
            "unipotent_power": self.unipotent_power,
            "orders": self.orders,
            "witness": self.witness,
        }


def _phi(q: int) -> int:
    return sum(1 for a in range(1, q + 1) if gcd(a, q) == 1)


def _lcm(a, b):
    return a * b // gcd(a, b)


def _is_unipotent_power(A, m: int) -> bool:
    n = len(A)
    B = mat_sub(mat_pow(A, m), mat_eye(n))
    return is_zero(mat_pow(B, n))


def _witness(M, target: complex, kind: str) -> dict:
    w, V = np.linalg.eig(np.asarray([[complex(v) for v in row] for row in M], dtype=np.complex128))
    i = int(np.argmin(np.abs(w - target)))
    v = V[:, i] / np.max(np.abs(V[:, i]))
    return {"eigenvalue": [repr(w[i].real), repr(w[i].imag)], "vector": [[repr(c.real), repr(c.imag)] for c in v],
            "kind": kind}


def linear_orbit_classify(M, order_bound: int = 1000, prec: int = 128) -> LinearClassification:
    """FINITE iff every eigenvalue is a root of unity, with the least m making M^m unipotent.

    Entries are taken exactly (floats as dyadic rationals).  A root of unity of
    order q among the eigenvalues has degree phi(q) <= 2n over Q, so only those
    q are tried; FINITE is then confirmed by the exact identity (M^m - I)^n = 0.
    """
    A = mat_exact(M)
    n = len(A)
    if n == 0 or any(len(r) != n for r in A):
        raise BadInput("matrix must be square and non-empty")
    cp = charpoly(A)
    if not cp[0]:
        raise BadInput("matrix must be invertible")
    eig = eigen_enclosures(M, prec)
    real_rational = all(v.im == 0 for row in A for v in row)
    dmax = n if real_rational else 2 * n
    qs = [q for q in range(1, order_bound + 1) if _phi(q) <= dmax]
    # phi(q) >= sqrt(q / 2), so every admissible order is below 2 dmax^2
    qs_complete = not any(_phi(q) <= dmax for q in range(order_bound + 1, 2 * dmax * dmax + 1))
    orders = []
    for e in eig:
        b = e.ball(prec)
        mod = abs(b)
        if not mod.contains(1):
            kind = "contracting" if mod.upper() < 1 else "expanding"
            return LinearClassification(INFINITE, eig, witness=_witness(M, e.center, kind))
        found = None
        for q in qs:
            if (b ** q - 1).contains_zero():
                found = q
                break
        if found is None:
            if not qs_complete:
                raise OrderBoundExceeded(f"eigenvalue near {e.center:.6g} unresolved up to order {order_bound}")
            return LinearClassification(INFINITE, eig, witness=_witness(M, e.center, "dense-rotation"))
        orders.append(found)
    L = 1
    for q in orders:
        L = _lcm(L, q)
    if not _is_unipotent_power(A, L):
        raise OrderBoundExceeded(f"eigenvalue balls admit order lcm {L} but (M^{L} - I)^{n} != 0 exactly")
    m = min(d for d in range(1, L + 1) if L % d == 0 and _is_unipotent_power(A, d))
    return LinearClassification(FINITE, eig, unipotent_power=m, orders=orders)


def periodic_points_fixed(M, m: int, periods=(1, 2, 3, 4, 6), samples: int = 5, seed: int = 0,
                          tol: float = 1e-9) -> dict:
    """Sample periodic points (null vectors of M^p - I) and test M^m p = p for each."""
    Mf = np.asarray([[complex(v) for v in row] for row in M], dtype=np.complex128)
    n = Mf.shape[0]
    rng = np.random.default_rng(seed)
    Mm = np.linalg.matrix_power(Mf, m)
    checked, ok = 0, 0
    for p in periods:
        A = np.linalg.matrix_power(Mf, p) - np.eye(n)
        _, s, vh = np.linalg.svd(A)
        null = vh[s <= tol * max(1.0, s.max() if s.size else 1.0)].conj().T
        if null.size == 0:
            continue
        for _ in range(samples):
            c = rng.normal(size=null.shape[1]) + 1j * rng.normal(size=null.shape[1])
            v = null @ c
            checked += 1
            ok += bool(np.linalg.norm(Mm @ v - v) <= 1e-8 * max(1.0, np.linalg.norm(v)))
    return {"m": m, "checked": checked, "fixed_by_M^m": ok, "holds": checked == ok}
