"""Numerical explorer for Per_k sets and fixed-point curves of polynomial germs."""

from .explore import (FIRES, NONE, SILENT, Cluster, CurveProbe, PerKPoint, PerKResult, components,
                      direct_linear_part, fixed_curve_probe, isolated_fixed_criterion, per_k_points, ring_seeds)

__all__ = [
    "PerKResult", "PerKPoint", "Cluster", "CurveProbe", "per_k_points", "components", "fixed_curve_probe",
    "isolated_fixed_criterion", "direct_linear_part", "ring_seeds", "FIRES", "SILENT", "NONE",
]
