"""Per_k sets of polynomial germs by Newton, clustering, fixed-curve probes and the
isolated-fixed-point criterion for tangent-to-identity maps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from .. import _kernels
from ..dynsim.exact import GaussRat, det
from ..dynsim.orbit import Domain, as_ball_point
from ..dynsim.poly import Poly, PolyMap
from ..errors import BadInput, DegenerateOrder

COLLINEAR_RATIO = 1e3
FIRES = "FIRES"
SILENT = "SILENT"
NONE = "NONE"


@dataclass
class PerKPoint:
    point: np.ndarray
    residual: float  # rigorous upper bound on max_i |F^k(p)_i - p_i| at the float point
    in_ball: bool
    singular: bool  # Jacobian of F^k - id rank-deficient at the solution

    def to_json(self) -> dict:
        return {
            "point": [[repr(float(z.real)), repr(float(z.imag))] for z in self.point],
            "residual": repr(float(self.residual)),
            "orbit_in_ball": self.in_ball,
            "singular": self.singular,
        }


@dataclass
class Cluster:
    representative: np.ndarray
    diameter: float
    cardinality: int
    dimension: int
    members: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "representative": [[repr(float(z.real)), repr(float(z.imag))] for z in self.representative],
            "diameter": repr(float(self.diameter)),
            "cardinality": self.cardinality,
            "dimension": self.dimension,
        }


@dataclass
class PerKResult:
    k: int
    points: list
    components: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    ball: Domain | None = None
    tol: float = 1e-10

    def array(self) -> np.ndarray:
        if not self.points:
            return np.zeros((0, 0), dtype=np.complex128)
        return np.array([p.point for p in self.points])

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "tol": repr(self.tol),
            "points": [p.to_json() for p in self.points],
            "components": [c.to_json() for c in self.components],
            "counts": self.counts,
        }

    def to_csv(self) -> str:
        dim = len(self.points[0].point) if self.points else 0
        head = ["index"] + [f"{a}{i + 1}" for i in range(dim) for a in ("re", "im")] + ["residual", "cluster"]
        lab = {}
        for ci, c in enumerate(self.components):
            for m in c.members:
                lab[m] = ci
        lines = [",".join(head)]
        for i, p in enumerate(self.points):
            row = [str(i)]
            for z in p.point:
                row += [repr(float(z.real)), repr(float(z.imag))]
            row += [repr(float(p.residual)), str(lab.get(i, -1))]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def ring_seeds(dim: int, radius: float, rings: int = 3, grid: int = 16, center=None) -> np.ndarray:
    """Concentric rings of a (grid x grid) angle lattice, plus the center.

    In C^2 a seed is r (cos a, e^{i b} sin a); in other dimensions the angle a
    spreads the modulus over the first two coordinates and b sets the phase.
    """
    c = np.zeros(dim, dtype=np.complex128) if center is None else np.asarray(center, dtype=np.complex128)
    out = [c.copy()]
    a = np.linspace(0, 2 * np.pi, grid, endpoint=False)
    b = np.linspace(0, 2 * np.pi, grid, endpoint=False)
    for i in range(1, rings + 1):
        r = radius * i / (rings + 1)
        for ai in a:
            for bi in b:
                s = c.copy()
                if dim == 1:
                    s[0] += r * np.exp(1j * (ai + bi / grid))
                else:
                    s[0] += r * np.cos(ai)
                    s[1] += r * np.exp(1j * bi) * np.sin(ai)
                out.append(s)
    return np.array(out)


def _orbit_in_ball(fmap: PolyMap, p, k, domain: Domain, prec: int):
    """Rigorous residual bound and in-ball flag for p, F(p), ..., F^{k-1}(p)."""
    q0 = as_ball_point(p, prec)
    q = q0
    inside = domain.classify(q) is True
    for _ in range(k):
        q = fmap.eval_ball(q, prec)
        inside = inside and domain.classify(q) is not False
    res = max(float(abs(a - b).upper()) for a, b in zip(q, q0))
    return res, inside


def per_k_points(fmap: PolyMap, k: int, ball=1.0, seed_grid=(3, 16), tol: float = 1e-10,
                 maxit: int = 200, mu: float = 1e-12, seeds=None, prec: int = 128) -> PerKResult:
    """Newton on F^k(p) - p from ring seeds; converged points are merged and checked in balls."""
    if k < 1:
        raise BadInput("k must be >= 1")
    domain = ball if isinstance(ball, Domain) else Domain.around(fmap.dim, float(ball))
    if seeds is None:
        seeds = ring_seeds(fmap.dim, domain.radius, seed_grid[0], seed_grid[1], domain.center)
    a = fmap.arrays
    # polish well past tol: on multiple roots (fixed curves of x^2 type) Newton is only linear
    pts, status, res, _ = _kernels.newton_batch(a.coef, a.exps, a.comp, a.dim,
                                                np.asarray(seeds, dtype=np.complex128), k, maxit, tol * tol, mu,
                                                1e3 * (domain.radius + 1))
    counts = {"seeds": int(len(seeds)), "converged": 0, "diverged": int(np.sum(status == 1)),
              "stalled": 0, "outside_ball": 0, "merged": 0, "singular": 0}
    kept = []
    merge = max(tol, 1e-9) * 10
    for p in pts[status != 1]:
        counts["converged"] += 1
        if any(np.max(np.abs(p - q.point)) <= merge for q in kept):
            counts["merged"] += 1
            continue
        r, inside = _orbit_in_ball(fmap, p, k, domain, prec)
        if not inside:
            counts["outside_ball"] += 1
            continue
        if r > tol:
            counts["stalled"] += 1
            continue
        sing = _singular_at(fmap, p, k)
        counts["singular"] += int(sing)
        kept.append(PerKPoint(p, r, True, sing))
    return PerKResult(k, kept, [], counts, domain, tol)


def _singular_at(fmap: PolyMap, p, k, rtol: float = 1e-8) -> bool:
    q = np.asarray(p, dtype=np.complex128)[None, :]
    J = np.eye(fmap.dim, dtype=np.complex128)
    for _ in range(k):
        v, jf = fmap.eval_jac(q)
        J = jf[0] @ J
        q = v
    s = np.linalg.svd(J - np.eye(fmap.dim), compute_uv=False)
    return bool(s[-1] <= rtol * max(1.0, s[0]))


def _dimension(P: np.ndarray, spread_tol: float) -> int:
    if len(P) < 2:
        return 0
    C = P - P.mean(axis=0)
    if np.max(np.abs(C)) <= spread_tol:
        return 0
    s = np.linalg.svd(C, compute_uv=False)
    if len(P) == 2 or len(s) < 2 or s[1] == 0 or s[0] / s[1] >= COLLINEAR_RATIO:
        return 1
    return 2


def components(result: PerKResult, eps: float | None = None) -> PerKResult:
    """Single-linkage clusters at radius eps (default a quarter of the ball radius).

    Each cluster gets a diameter and a dimension estimate: 0 for a point, 1 when
    the complex point cloud is collinear (singular value ratio >= 1e3), else 2.
    """
    if not result.points:
        raise BadInput("no points to cluster")
    if eps is None:
        eps = 0.25 * (result.ball.radius if result.ball else 1.0)
    P = result.array()
    R = np.concatenate([P.real, P.imag], axis=1)
    if len(P) == 1:
        labels = np.array([1])
    else:
        labels = fcluster(linkage(R, method="single", metric="euclidean"), t=eps, criterion="distance")
    comps = []
    for lab in sorted(set(labels.tolist())):
        idx = [i for i in range(len(P)) if labels[i] == lab]
        Q = P[idx]
        diam = 0.0
        if len(idx) > 1:
            D = np.abs(Q[:, None, :] - Q[None, :, :])
            diam = float(np.sqrt(np.sum(D ** 2, axis=2)).max())
        rep = Q[int(np.argmin(np.sum(np.abs(Q - Q.mean(axis=0)) ** 2, axis=1)))]
        comps.append(Cluster(rep, diam, len(idx), _dimension(Q, 100 * result.tol ** 0.5), idx))
    comps.sort(key=lambda c: -c.cardinality)
    return PerKResult(result.k, result.points, comps, result.counts, result.ball, result.tol)


# ---------------------------------------------------------------------------------------------
# fixed curves


@dataclass
class CurveProbe:
    m: int | None
    eigen_report: list  # per m: eigenvalues of D_0 F^m
    direct_report: list  # per m: eigenvalues from the composed map's linear part
    evidence: dict
    verdict: str

    def to_json(self) -> dict:
        def cl(v):
            return [[repr(float(z.real)), repr(float(z.imag))] for z in v]

        return {
            "m": self.m,
            "verdict": self.verdict,
            "eigenvalues": {str(i + 1): cl(v) for i, v in enumerate(self.eigen_report)},
            "evidence": {str(k): v for k, v in self.evidence.items()},
        }


def fixed_curve_probe(fmap: PolyMap, m_max: int = 6, ball=0.5, tol: float = 1e-10,
                      eig_tol: float = 1e-9, seed_grid=(2, 12)) -> CurveProbe:
    """Least m whose D_0 F^m has eigenvalue 1 and whose F^m - id has non-isolated zeros near 0."""
    if not fmap.fixes_origin():
        raise BadInput("map must fix the origin")
    domain = ball if isinstance(ball, Domain) else Domain.around(fmap.dim, float(ball))
    L = fmap.linear_part()
    ev = np.linalg.eigvals(L)
    eigen, direct, evidence = [], [], {}
    one = PolyMap([c.truncate(1) for c in fmap.comps])
    comp = one
    for m in range(1, m_max + 1):
        pw = ev ** m
        eigen.append(pw)
        if m > 1:
            # direct route: compose F itself, dropping degree > 1 (valid since F(0) = 0)
            comp = fmap.compose(comp, max_degree=1)
        direct.append(np.linalg.eigvals(comp.linear_part()))
        if np.min(np.abs(pw - 1)) > eig_tol:
            continue
        res = per_k_points(fmap, m, domain, seed_grid, tol)
        far = [p for p in res.points if np.max(np.abs(p.point)) > domain.radius / 100]
        evidence[m] = {"converged": len(res.points), "away_from_origin": len(far)}
        if len(far) >= 2:
            return CurveProbe(m, eigen, direct, evidence, "CURVE")
    return CurveProbe(None, eigen, direct, evidence, NONE)


def direct_linear_part(fmap: PolyMap, m: int) -> np.ndarray:
    """D_0(F^m) from the m-fold composition of F itself, truncated at degree 1."""
    comp = fmap.power(m, max_degree=1)
    return comp.linear_part()


def _binary_resultant(P: Poly, Q: Poly, d: int) -> GaussRat:
    """Resultant of two binary forms of degree d (formal degree, so a shared factor y counts)."""
    def coeffs(F):
        # coefficient of x^i y^{d-i}, highest x power first
        return [GaussRat.of(F.terms.get((i, d - i), 0)) for i in range(d, -1, -1)]

    a, b = coeffs(P), coeffs(Q)
    n = 2 * d
    S = [[GaussRat(0)] * n for _ in range(n)]
    for r in range(d):
        for i, c in enumerate(a):
            S[r][r + i] = c
        for i, c in enumerate(b):
            S[d + r][r + i] = c
    return det(S)


def isolated_fixed_criterion(fmap: PolyMap) -> dict:
    """FIRES iff the lowest homogeneous parts of F - id share no factor (exact resultant != 0)."""
    if fmap.dim != 2:
        raise BadInput("the criterion is for planar maps")
    D = [fmap.comps[i] - Poly.var(i, 2) for i in range(2)]
    if not fmap.fixes_origin() or any(abs(D[i].terms.get(e, 0)) for i in range(2) for e in ((1, 0), (0, 1))):
        raise BadInput("map must be tangent to the identity")
    if all(p.is_zero for p in D):
        raise DegenerateOrder("F - id vanishes identically")
    d = min(p.min_degree() for p in D if not p.is_zero)
    P1, P2 = D[0].homogeneous(d), D[1].homogeneous(d)
    res = _binary_resultant(P1, P2, d)
    return {
        "verdict": FIRES if res else SILENT,
        "order": d,
        "leading": [P1.to_str(), P2.to_str()],
        "resultant": [str(res.re), str(res.im)],
    }
