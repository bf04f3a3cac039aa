"""Ball arithmetic, log-scale magnitudes and lazy counts."""

from .ball import BallComplex, BallReal
from .logscale import BigCount, CeilExpr, LogScaleReal
from .ops import chord, circle, circle_minus_one, frac_dist, lam_pow, pow_int

__all__ = [
    "BallReal", "BallComplex", "LogScaleReal", "BigCount", "CeilExpr",
    "pow_int", "frac_dist", "circle", "circle_minus_one", "chord", "lam_pow",
]
