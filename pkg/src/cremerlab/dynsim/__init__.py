"""Orbit laboratory: polynomial maps, linear theory, Taylor flows and the S o T example."""

from .flow import PETAL_POINT, FlowResult, STReport, exp_flow, monomial_drift, st_example
from .linear import (FINITE, INFINITE, eigen_enclosures, jordan_block, jordan_projection,
                     linear_orbit_classify, periodic_points_fixed)
from .orbit import BUDGET_EXHAUSTED, ESCAPED, PERIODIC, Domain, OrbitRecord, iterate
from .poly import Poly, PolyMap, PolyVectorField, parse_polys

__all__ = [
    "Poly", "PolyMap", "PolyVectorField", "parse_polys",
    "Domain", "OrbitRecord", "iterate", "ESCAPED", "PERIODIC", "BUDGET_EXHAUSTED",
    "jordan_projection", "jordan_block", "linear_orbit_classify", "eigen_enclosures",
    "periodic_points_fixed", "FINITE", "INFINITE",
    "exp_flow", "FlowResult", "st_example", "STReport", "monomial_drift", "PETAL_POINT",
]
