"""Sweeps of finite-L quantities over a logarithmic L grid.

A sweep records ``value(L)`` next to the L -> infinity limit and fits the
exponent ``a`` in ``|value(L) - limit| ~ C L^(-a)``.  When no limit formula
exists (Levi-Civita) the fit uses differences of consecutive grid values,
which decay with the same exponent on a geometric grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .connections import ConnectionKind
from .curves import Branch, ParamCurve, curve_curvature_L, curve_curvature_limit
from .surface_curves import OnSurfaceCurve, geodesic_curvature_L, geodesic_curvature_limit
from .surfaces import _as_u, gauss_curvature_L, gauss_curvature_limit, mean_curvature_L, mean_curvature_limit

QUANTITIES = ("curve-curvature", "geodesic-curvature", "gauss-curvature", "mean-curvature")
# remainders below this (relative to 1 + |limit|) are roundoff and skipped by the fit
ROUNDOFF_FLOOR = 1e-12


@dataclass
class ScanResult:
    quantity: str
    kind: str
    L: list
    values: list
    limit: float | None
    remainders: list
    exponent: float | None
    fit_points: int
    branch: str | None = None
    scaled: bool = False
    warnings: list = field(default_factory=list)


def log_grid(L_min: float, L_max: float, count: int) -> np.ndarray:
    if not 0 < L_min < L_max or count < 2:
        raise ValueError("need 0 < L_min < L_max and at least two grid points")
    return np.geomspace(L_min, L_max, count)


def fit_exponent(L, remainders, scale: float = 1.0) -> tuple[float | None, int]:
    """Least-squares slope of ``-log r`` against ``log L`` over non-roundoff samples."""
    L, r = np.asarray(L, dtype=float), np.abs(np.asarray(remainders, dtype=float))
    keep = np.isfinite(r) & (r > ROUNDOFF_FLOOR * scale)
    if keep.sum() < 2:
        return None, int(keep.sum())
    slope = np.polyfit(np.log(L[keep]), np.log(r[keep]), 1)[0]
    return float(-slope), int(keep.sum())


def _limit_or_none(fn):
    try:
        return fn()
    except ValueError as err:
        if type(err).__name__ == "UnsupportedKindError":
            return None
        raise


def limit_scan(quantity: str, kind, grid, *, curve: ParamCurve | None = None, t: float | None = None,
               u=None, point=None) -> ScanResult:
    """Evaluate ``quantity`` on ``grid``.

    Curve quantities need ``curve`` and ``t`` (plus ``u`` for geodesic
    curvature); surface quantities need ``u`` and ``point``.  On a divergent
    horizontal branch the scanned value is ``k / sqrt(L)``.
    """
    kind = ConnectionKind.parse(kind)
    grid = np.asarray(grid, dtype=float)
    branch, scaled = None, False
    if quantity == "curve-curvature":
        if curve is None or t is None:
            raise ValueError("curve-curvature needs a curve and a parameter value")
        values = np.array([float(curve_curvature_L(kind, L, curve, t)) for L in grid])
        lim = _limit_or_none(lambda: curve_curvature_limit(kind, curve, t))
    elif quantity == "geodesic-curvature":
        if curve is None or t is None or u is None:
            raise ValueError("geodesic-curvature needs a surface, a curve and a parameter value")
        onc = OnSurfaceCurve(curve, _as_u(u))
        values = np.array([float(geodesic_curvature_L(kind, L, onc, t)) for L in grid])
        lim = _limit_or_none(lambda: geodesic_curvature_limit(kind, onc, t))
    elif quantity in ("gauss-curvature", "mean-curvature"):
        if u is None or point is None:
            raise ValueError(f"{quantity} needs a surface and a point")
        u = _as_u(u)
        point = np.asarray(point, dtype=float)
        if quantity == "gauss-curvature":
            values = np.array([float(gauss_curvature_L(kind, L, u, point).K_surf) for L in grid])
            lim = _limit_or_none(lambda: float(gauss_curvature_limit(kind, u, point)))
        else:
            values = np.array([float(mean_curvature_L(kind, L, u, point)) for L in grid])
            lim = float(mean_curvature_limit(kind, u, point))
    else:
        raise ValueError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")

    if lim is not None and not isinstance(lim, float):
        branch = lim.branch.value
        if lim.branch is Branch.HORIZONTAL_DIVERGENT:
            values, scaled = values / np.sqrt(grid), True
        lim = lim.value

    warnings = []
    if lim is None:
        remainders = np.abs(np.diff(values))
        exponent, used = fit_exponent(grid[1:], remainders, 1.0 + np.max(np.abs(values)))
        remainders = [None, *remainders.tolist()]
    else:
        remainders = np.abs(values - lim)
        exponent, used = fit_exponent(grid, remainders, 1.0 + abs(lim))
        remainders = remainders.tolist()
    if exponent is None:
        warnings.append("fewer than two remainders above roundoff; no exponent fitted")
    return ScanResult(quantity, kind.value, grid.tolist(), values.tolist(), lim, remainders,
                      exponent, used, branch, scaled, warnings)
