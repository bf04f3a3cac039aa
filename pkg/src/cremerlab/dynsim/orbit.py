"""Stepwise orbits in ball arithmetic with in-domain checks and period detection."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ..errors import BadInput, UndecidedBoundary
from ..numerics.ball import BallComplex, BallReal
from .poly import PolyMap

ESCAPED = "ESCAPED"
PERIODIC = "PERIODIC"
BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"


@dataclass(frozen=True)
class Domain:
    """Closed polydisk max_i |z_i - center_i| <= radius."""

    center: tuple
    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and np.isfinite(self.radius)):
            raise BadInput("domain radius must be positive and finite")
        object.__setattr__(self, "center", tuple(complex(c) for c in self.center))

    @classmethod
    def around(cls, dim: int, radius: float, center=None) -> "Domain":
        return cls(tuple(center) if center is not None else (0j,) * dim, float(radius))

    def dist_ball(self, p: list) -> BallReal:
        """Ball for max_i |p_i - c_i|."""
        ds = [abs(z - c) for z, c in zip(p, self.center)]
        lo = max(d.lower() for d in ds)
        hi = max(d.upper() for d in ds)
        return BallReal.from_interval(lo, hi, ds[0].prec)

    def classify(self, p: list):
        """True inside, False strictly outside, None when the ball straddles the boundary."""
        d = self.dist_ball(p)
        if d.upper() <= self.radius:
            return True
        if d.lower() > self.radius:
            return False
        return None

    def contains_float(self, p) -> bool:
        return max(abs(complex(z) - c) for z, c in zip(p, self.center)) <= self.radius

    def to_json(self) -> dict:
        return {"center": [[repr(c.real), repr(c.imag)] for c in self.center], "radius": repr(self.radius)}


@dataclass
class OrbitRecord:
    points: list
    termination: str
    step: int | None = None  # escape step, or the period
    residual: float | None = None
    domain: Domain | None = None
    direction: str = "forward"
    estimate_grade: bool = False
    info: dict = field(default_factory=dict)

    @property
    def period(self):
        return self.step if self.termination == PERIODIC else None

    def to_json(self) -> dict:
        return {
            "termination": self.termination,
            "step": self.step,
            "residual": None if self.residual is None else repr(float(self.residual)),
            "direction": self.direction,
            "estimate_grade": self.estimate_grade,
            "domain": self.domain.to_json() if self.domain else None,
            "length": len(self.points),
            "info": self.info,
        }

    def rows(self, monomials=()) -> list:
        """(step, re/im per coordinate, |xy| when 2-d, monomials, in_domain)."""
        out = []
        for s, p in enumerate(self.points):
            z = [complex(c) for c in p]
            row = [s]
            for c in z:
                row += [repr(c.real), repr(c.imag)]
            if len(z) == 2:
                row.append(repr(abs(z[0] * z[1])))
            for a, b in monomials:
                row.append(repr(abs(z[0] ** a * z[1] ** b)))
            inside = self.domain.contains_float(z) if self.domain else True
            row.append(int(inside))
            out.append(row)
        return out

    def to_csv(self, monomials=()) -> str:
        dim = len(self.points[0]) if self.points else 0
        head = ["step"]
        for i in range(dim):
            head += [f"re{i + 1}", f"im{i + 1}"]
        if dim == 2:
            head.append("abs_xy")
        head += [f"abs_x^{a}y^{b}" for a, b in monomials]
        head.append("in_domain")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(head)
        w.writerows(self.rows(monomials))
        return buf.getvalue()


def as_ball_point(p, prec: int) -> list:
    return [z if isinstance(z, BallComplex) else BallComplex.from_complex(complex(z), prec) for z in p]


def _diff_upper(a: list, b: list) -> float:
    return max(float(abs(x - y).upper()) for x, y in zip(a, b))


def _diff_lower(a: list, b: list) -> float:
    return max(float(abs(x - y).lower()) for x, y in zip(a, b))


def _run(step, p0, domain, budget, tol, prec, verify):
    pts = [p0]
    p = p0
    if domain.classify(p0) is not True:
        raise BadInput("start point is not inside the domain")
    for s in range(1, budget + 1):
        p = step(p, prec)
        pts.append(p)
        where = domain.classify(p)
        if where is None:
            return pts, None, s, None
        if where is False:
            return pts, ESCAPED, s, None
        if _diff_lower(p, p0) <= tol:
            # collision with the start: confirm at doubled precision
            res = verify(s)
            if res is not None and res <= tol:
                return pts, PERIODIC, s, res
    return pts, BUDGET_EXHAUSTED, budget, None


def iterate(fmap: PolyMap, p, domain: Domain | float, budget: int = 1000, direction: str = "forward",
            prec: int = 128, tol: float = 1e-12) -> OrbitRecord:
    """Iterate in ball arithmetic until escape, a verified return, or the budget runs out."""
    if direction not in ("forward", "backward"):
        raise BadInput("direction must be forward or backward")
    g = fmap if direction == "forward" else fmap.inverted()
    if not isinstance(domain, Domain):
        domain = Domain.around(fmap.dim, float(domain))
    if len(p) != fmap.dim:
        raise BadInput("point has the wrong dimension")

    def step(q, pr):
        return g.eval_ball(q, pr)

    def verify_at(pr):
        def v(s):
            q0 = as_ball_point(p, pr)
            q = q0
            for _ in range(s):
                q = step(q, pr)
                if domain.classify(q) is not True:
                    return None
            return _diff_upper(q, q0)
        return v

    for pr in (prec, 2 * prec):
        pts, kind, s, res = _run(step, as_ball_point(p, pr), domain, budget, tol, pr, verify_at(2 * pr))
        if kind is not None:
            return OrbitRecord(pts, kind, s, res, domain, direction)
    raise UndecidedBoundary(f"orbit point {s} straddles the domain boundary at {2 * prec} bits")
