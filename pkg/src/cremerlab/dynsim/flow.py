"""Taylor flows exp(tX) of polynomial fields, and the S o T example without invariant curves.

Flows are estimate-grade: the reported error is the sum over substeps of the
last Taylor term, not a bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import _kernels
from ..errors import BadInput, NonConvergent
from ..numerics.ball import BallComplex
from .orbit import BUDGET_EXHAUSTED, ESCAPED, PERIODIC, Domain, OrbitRecord
from .poly import PolyVectorField

DEFAULT_ORDER = 16
DEFAULT_SCALE = 10  # 2^10 substeps

# X = xy(x d/dx - y d/dy) + i x^2 y^2 (x d/dx + y d/dy)
ST_FIELD = "x^2*y + i*x^3*y^2, -x*y^2 + i*x^2*y^3"
FLOWER_FIELD = "2i*z^3"
# x0 y0 on the attracting direction e^{i pi/4} of the flower map, where Re(xy) > 0
PETAL_POINT = (0.2 + 0j, 0.2 * np.exp(0.25j * np.pi))


@dataclass
class FlowResult:
    z: np.ndarray
    error_estimate: float
    converged: bool
    order: int
    substeps: int
    estimate_grade: bool = True

    def ball(self, prec: int = 128) -> list:
        return [BallComplex.from_complex(complex(v), prec).inflate(self.error_estimate) for v in self.z]

    def to_json(self) -> dict:
        return {
            "z": [[repr(float(v.real)), repr(float(v.imag))] for v in self.z],
            "error_estimate": repr(float(self.error_estimate)),
            "converged": self.converged,
            "order": self.order,
            "substeps": self.substeps,
            "estimate_grade": True,
        }


def _decays(X: PolyVectorField, p, h, order) -> bool:
    a = X.arrays
    c = _kernels.taylor_coeffs(a.coef, a.exps, a.comp, a.dim, np.asarray(p, dtype=np.complex128), order)
    norms = np.sqrt(np.sum(np.abs(c * (h ** np.arange(order + 1))[:, None]) ** 2, axis=1))
    tiny = 1e-300 + 1e-17 * max(norms[0], 1e-300)
    tail = norms[-4:]
    growth = [tail[i + 1] >= tail[i] and tail[i + 1] > tiny for i in range(3)]
    return not all(growth)


def exp_flow(X: PolyVectorField, t, p, order: int = DEFAULT_ORDER, substeps: int | None = None,
             scale: int = DEFAULT_SCALE) -> FlowResult:
    """exp(tX)(p) by composing ``substeps`` (default 2^scale) truncated Taylor steps."""
    if order < 1:
        raise BadInput("order must be >= 1")
    p = np.asarray(p, dtype=np.complex128).reshape(-1)
    if p.shape[0] != X.dim:
        raise BadInput("point has the wrong dimension")
    n = substeps if substeps is not None else 1 << scale
    if n < 1:
        raise BadInput("substeps must be >= 1")
    if X.is_zero or t == 0:
        return FlowResult(p.copy(), 0.0, True, order, n)
    a = X.arrays
    z, est = _kernels.taylor_flow(a.coef, a.exps, a.comp, a.dim, p, complex(t), order, n)
    if not np.all(np.isfinite(z)) or not np.isfinite(est):
        raise NonConvergent("flow left the representable range")
    return FlowResult(np.asarray(z), float(est), _decays(X, p, complex(t) / n, order), order, n)


# ---------------------------------------------------------------------------------------------
# S o T


def S(p):
    x, y = p
    return np.array([1j * y, 1j * x], dtype=np.complex128)


def _st_field():
    return PolyVectorField.parse(ST_FIELD, name="X")


def _flower_field():
    return PolyVectorField.parse(FLOWER_FIELD, name="2iz^3")


@dataclass
class STReport:
    orbit: OrbitRecord
    t_orbit: OrbitRecord
    semiconj_residual: float
    flow_error: float
    steps_compared: int
    z_direction: complex | None
    info: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = self.z_direction
        return {
            "orbit": self.orbit.to_json(),
            "t_orbit": self.t_orbit.to_json(),
            "semiconjugacy_residual": repr(float(self.semiconj_residual)),
            "flow_error_estimate": repr(float(self.flow_error)),
            "steps_compared": self.steps_compared,
            "z_direction": None if d is None else [repr(d.real), repr(d.imag)],
            "estimate_grade": True,
        }


def _float_orbit(step, p0, domain: Domain, budget: int, tol: float, verify, prec: int = 64):
    pts = [p0.copy()]
    errs = [0.0]
    p = p0.copy()
    err = 0.0
    for s in range(1, budget + 1):
        p, e = step(p)
        err += e
        pts.append(p.copy())
        errs.append(err)
        dist = max(abs(complex(v) - c) for v, c in zip(p, domain.center))
        if dist - err > domain.radius:
            return pts, errs, ESCAPED, s, None
        if dist + err > domain.radius:
            continue  # straddles: keep going, it may come back or clear the boundary
        if np.max(np.abs(p - p0)) <= tol + err:
            res = verify(s)
            if res is not None and res <= tol:
                return pts, errs, PERIODIC, s, res
    return pts, errs, BUDGET_EXHAUSTED, budget, None


def _record(pts, errs, kind, s, res, domain, prec=64):
    balls = [[BallComplex.from_complex(complex(v), prec).inflate(e) for v in p] for p, e in zip(pts, errs)]
    return OrbitRecord(balls, kind, s, res, domain, "forward", estimate_grade=True)


def st_example(p, domain=0.3, budget: int = 200, mode: str = "ST", compare: int = 50,
               order: int = DEFAULT_ORDER, scale: int = DEFAULT_SCALE, tol: float = 1e-10) -> STReport:
    """Orbit of F = S o T (or T alone) plus the semiconjugacy (xy) o T^k = G^k(xy)."""
    if mode not in ("ST", "T"):
        raise BadInput("mode must be ST or T")
    p = np.asarray(p, dtype=np.complex128).reshape(2)
    if not isinstance(domain, Domain):
        domain = Domain.around(2, float(domain))
    if not domain.contains_float(p):
        raise BadInput("start point is not inside the domain")
    X = _st_field()
    G = _flower_field()

    def make_step(sc):
        def step(q):
            r = exp_flow(X, 1.0, q, order, scale=sc)
            z = r.z if mode == "T" else S(r.z)
            return z, r.error_estimate
        return step

    def verify(s):
        q = p.copy()
        st = make_step(scale + 1)
        for _ in range(s):
            q, _ = st(q)
        return float(np.max(np.abs(q - p)))

    pts, errs, kind, s, res = _float_orbit(make_step(scale), p, domain, budget, tol, verify)
    orbit = _record(pts, errs, kind, s, res, domain)
    orbit.info["mode"] = mode

    # T-only orbit against the 1-D flower map on z = xy
    tq = p.copy()
    z = np.array([p[0] * p[1]])
    tpts, terrs = [tq.copy()], [0.0]
    worst, ferr, last_z = 0.0, 0.0, None
    k = 0
    for k in range(1, compare + 1):
        try:
            r = exp_flow(X, 1.0, tq, order, scale=scale)
            g = exp_flow(G, 1.0, z, order, scale=scale)
        except NonConvergent:
            k -= 1
            break
        tq, z = r.z, g.z
        ferr += r.error_estimate + g.error_estimate
        tpts.append(tq.copy())
        terrs.append(terrs[-1] + r.error_estimate)
        worst = max(worst, abs(tq[0] * tq[1] - z[0]))
        last_z = complex(z[0])
        if not np.all(np.isfinite(tq)) or np.max(np.abs(tq)) > 1e6:
            break
    t_orbit = _record(tpts, terrs, BUDGET_EXHAUSTED, k, None, None)
    t_orbit.info["mode"] = "T"
    direction = None if not last_z else last_z / abs(last_z)
    return STReport(orbit, t_orbit, worst, ferr, k, direction)


def monomial_drift(a: int, b: int, orbit: OrbitRecord) -> dict:
    """|x^a y^b| along a 2-d orbit and whether it increases strictly.

    x^a y^b o T = x^a y^b (1 + (a - b) xy + O(x^2 y^2)), so the leading drift is
    Re((a - b) xy); for a = b there is no first-order drift and no claim is made.
    """
    if a < 0 or b < 0:
        raise BadInput("exponents must be non-negative")
    vals, drift = [], []
    for pt in orbit.points:
        x, y = (complex(c) for c in pt)
        vals.append(abs(x ** a * y ** b))
        drift.append(((a - b) * x * y).real)
    inc = all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))
    return {
        "a": a,
        "b": b,
        "values": [repr(v) for v in vals],
        "strictly_increasing": inc,
        "in_sector": all(d > 0 for d in drift[:-1]),
        "asserted": a != b,
    }
