"""Curvature of curves and surfaces for four connections on the Heisenberg group,
their L -> infinity limits, and numeric Gauss-Bonnet checks."""

from __future__ import annotations

__version__ = "0.1.0"

from .connections import ConnectionKind, coeff_table, curvature_tensor
from .curves import Branch, ParamCurve, curve_curvature_L, curve_curvature_limit
from .gauss_bonnet import GBReport, Scene, gb_check_finite_L, gb_residual_limit
from .scenefile import load_scene
from .surface_curves import OnSurfaceCurve, geodesic_curvature_L, geodesic_curvature_limit
from .surfaces import gauss_curvature_L, gauss_curvature_limit, second_fundamental_form, surface_frame

__all__ = [
    "Branch", "ConnectionKind", "GBReport", "OnSurfaceCurve", "ParamCurve", "Scene",
    "coeff_table", "curvature_tensor", "curve_curvature_L", "curve_curvature_limit",
    "gauss_curvature_L", "gauss_curvature_limit", "gb_check_finite_L", "gb_residual_limit",
    "geodesic_curvature_L", "geodesic_curvature_limit", "load_scene", "second_fundamental_form",
    "surface_frame",
]
