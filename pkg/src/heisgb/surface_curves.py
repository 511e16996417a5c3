"""Geodesic curvature of curves lying on an implicit surface.

The tangent plane carries the orthonormal frame ``(e1, e2)``; ``J`` rotates
``e1 -> e2 -> -e1``.  Passing ``orientation=-1`` negates ``e2``, which reverses
``J`` and therefore the sign of every signed curvature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connections import ConnectionKind, coeff_table
from .curves import (
    Branch,
    CurveJet,
    ParamCurve,
    clamped_sqrt,
    default_eps_h,
    horizontal_discriminator,
    self_acceleration,
)
from .errors import DegenerateDenominatorError, TangencyError, UnsupportedKindError
from .heisenberg import check_metric_param, inner_L
from .surfaces import SurfaceFrame, _as_u, surface_frame

EPS_TAN = 1e-8


@dataclass(frozen=True)
class OnSurfaceCurve:
    curve: ParamCurve
    u: object  # expression of the surface

    @classmethod
    def from_strings(cls, u: str, components, interval=(0.0, 2.0 * np.pi)) -> "OnSurfaceCurve":
        return cls(ParamCurve.from_strings(components, interval), _as_u(u))


@dataclass(frozen=True)
class SignedLimitResult:
    """Limit geodesic curvature; divergent branch reports lim k/sqrt(L)."""

    branch: Branch
    value: float
    marginal: bool = False


def _orient(orientation: int) -> float:
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    return float(orientation)


def _evaluate(onc: OnSurfaceCurve, t, L: float):
    cj = onc.curve.jet(t)
    cj.require_regular()
    frame = surface_frame(onc.u, cj.pos, L)
    vel = cj.frame_vel
    defect = np.abs(inner_L(L, vel, frame.v_L))
    bad = defect > EPS_TAN * np.sqrt(inner_L(L, vel, vel))
    if np.any(bad):
        idx = np.flatnonzero(np.ravel(bad))[0]
        raise TangencyError(np.ravel(cj.t)[idx], np.ravel(defect)[idx])
    return cj, frame


def projected_acceleration(kind, L: float, onc: OnSurfaceCurve, t, *, table=None, _state=None):
    """Components ``(c1, c2)`` of the tangential part of ``nabla_{g'} g'``."""
    L = check_metric_param(L)
    cj, frame = _state if _state is not None else _evaluate(onc, t, L)
    c = self_acceleration(kind, L, cj, table)
    return inner_L(L, c, frame.e1), inner_L(L, c, frame.e2)


def projected_acceleration_expansion(kind, L: float, onc: OnSurfaceCurve, t, *, _state=None):
    """The expanded componentwise formulas for SVK1, SVK2 and ADAPTED."""
    kind = ConnectionKind.parse(kind)
    L = check_metric_param(L)
    cj, f = _state if _state is not None else _evaluate(onc, t, L)
    g1, g2 = cj.vel[..., 0], cj.vel[..., 1]
    a1, a2 = cj.acc[..., 0], cj.acc[..., 1]
    w, wd = cj.omega, cj.omega_dot
    if kind is ConnectionKind.SVK1:
        A, B, C = a1 + L * w * g2 / 2, a2 - L * w * g1 / 2, wd
    elif kind is ConnectionKind.SVK2:
        A, B, C = a1, a2 - L * w * g1 / 2, wd + g1 * g2 / 2
    elif kind is ConnectionKind.ADAPTED:
        A, B, C = a1, a2, wd
    else:
        raise UnsupportedKindError("expanded projection formulas cover svk1, svk2 and adapted")
    c1 = f.qbar * A - f.pbar * B
    c2 = f.rbar_L * f.pbar * A + f.rbar_L * f.qbar * B - (f.l / f.l_L) * np.sqrt(L) * C
    return c1, c2


def tangent_components(L: float, cj: CurveJet, frame: SurfaceFrame):
    vel = cj.frame_vel
    return inner_L(L, vel, frame.e1), inner_L(L, vel, frame.e2)


def _finite_values(kind, L, state, orientation, table):
    """Signed and unsigned curvature from one evaluation of curve and frame."""
    cj, frame = state
    c = self_acceleration(kind, L, cj, table)
    c1, c2 = inner_L(L, c, frame.e1), orientation * inner_L(L, c, frame.e2)
    a, b = tangent_components(L, cj, frame)
    b = orientation * b
    speed2 = a * a + b * b
    signed = (a * c2 - b * c1) / speed2**1.5
    first = (c1 * c1 + c2 * c2) / speed2**2
    second = (a * c1 + b * c2) ** 2 / speed2**3
    return signed, clamped_sqrt(first - second, first)


def geodesic_curvature_L(kind, L: float, onc: OnSurfaceCurve, t, signed: bool = True,
                         *, orientation: int = 1, table=None) -> np.ndarray:
    """Signed or unsigned geodesic curvature in ``(H, g_L)``."""
    L = check_metric_param(L)
    sgn = _orient(orientation)
    if table is None:
        table = coeff_table(kind, L)
    k_signed, k_unsigned = _finite_values(kind, L, _evaluate(onc, t, L), sgn, table)
    return k_signed if signed else k_unsigned


def geodesic_curvature_L_pair(kind, L: float, onc: OnSurfaceCurve, t, *, orientation: int = 1):
    """``(signed, unsigned)`` at once."""
    L = check_metric_param(L)
    return _finite_values(kind, L, _evaluate(onc, t, L), _orient(orientation), coeff_table(kind, L))


def _limit_nonhorizontal(kind, pbar, qbar, g1, g2, w, signed):
    if kind is ConnectionKind.SVK1:
        num = pbar * g1 + qbar * g2
    elif kind is ConnectionKind.SVK2:
        num = pbar * g1
    else:
        num = np.zeros_like(w)
    if not signed:
        num = np.abs(num)
    return num / (2 * np.abs(w))


@dataclass(frozen=True)
class LimitArrays:
    """Vectorised limit data: branch per sample plus signed and unsigned values.

    ``degenerate`` marks horizontal samples whose divergent-branch denominator
    vanishes; their values are NaN.
    """

    branch: np.ndarray  # object array of Branch
    signed: np.ndarray
    unsigned: np.ndarray
    marginal: np.ndarray
    degenerate: np.ndarray


def _limit_values(kind, state, eps_h, orientation) -> LimitArrays:
    cj, f = state
    g1, g2 = cj.vel[..., 0], cj.vel[..., 1]
    w = cj.omega
    disc = horizontal_discriminator(kind, cj)
    eps = default_eps_h(cj.vel) if eps_h is None else np.full(np.shape(w), float(eps_h))
    nonh = np.abs(w) > eps
    den = f.qbar * g1 - f.pbar * g2
    degenerate = ~nonh & (np.abs(den) <= eps)
    finite = ~nonh & ~degenerate & (np.abs(disc) <= eps)
    divergent = ~nonh & ~degenerate & ~finite

    safe_w = np.where(nonh, w, 1.0)
    safe_den = np.where(divergent, den, 1.0)
    signed_nh = _limit_nonhorizontal(kind, f.pbar, f.qbar, g1, g2, safe_w, True)
    signed_div = (-f.qbar * g1 + f.pbar * g2) * disc / np.abs(safe_den) ** 3
    signed = np.select([nonh, divergent, finite], [signed_nh, signed_div, 0.0], np.nan) * orientation
    unsigned = np.select([nonh, divergent, finite],
                         [np.abs(signed_nh), np.abs(disc) / safe_den**2, 0.0], np.nan)
    branch = np.select([nonh, divergent], [0, 2], 1)
    names = np.array([Branch.NON_HORIZONTAL, Branch.HORIZONTAL_FINITE, Branch.HORIZONTAL_DIVERGENT], dtype=object)
    marginal = (nonh & (np.abs(w) <= 1e3 * eps)) | (divergent & (np.abs(disc) <= 1e3 * eps))
    return LimitArrays(names[branch], signed, unsigned, marginal, degenerate)


def geodesic_curvature_limit_arrays(kind, onc: OnSurfaceCurve, t, eps_h: float | None = None, *,
                                    orientation: int = 1) -> LimitArrays:
    """Limit geodesic curvature at many parameter values."""
    kind = ConnectionKind.parse(kind)
    if kind is ConnectionKind.LEVI_CIVITA:
        raise UnsupportedKindError("limit geodesic curvature is provided for svk1, svk2 and adapted")
    return _limit_values(kind, _evaluate(onc, t, 1.0), eps_h, _orient(orientation))


def geodesic_curvature_limit(kind, onc: OnSurfaceCurve, t, signed: bool = True,
                             eps_h: float | None = None, *, orientation: int = 1) -> SignedLimitResult:
    """Sub-Riemannian limit of the geodesic curvature at one parameter value.

    On the divergent branch the value is the coefficient of ``sqrt(L)``.
    """
    if np.ndim(t) != 0:
        raise ValueError("geodesic_curvature_limit takes a single parameter value")
    res = geodesic_curvature_limit_arrays(kind, onc, t, eps_h, orientation=orientation)
    if bool(res.degenerate):
        raise DegenerateDenominatorError(
            f"|qbar g1' - pbar g2'| vanishes at a horizontal point (t={float(t):.6g})"
        )
    value = res.signed if signed else res.unsigned
    branch = res.branch.item() if isinstance(res.branch, np.ndarray) else res.branch
    return SignedLimitResult(branch, float(value), bool(res.marginal))


def signed_limit_line_density(kind, onc: OnSurfaceCurve, t, *, orientation: int = 1,
                              eps_h: float | None = None) -> np.ndarray:
    """``k_s * |w(g')|`` at many parameter values, for boundary integrals.

    Horizontal nodes carry zero limit length and contribute nothing.
    """
    kind = ConnectionKind.parse(kind)
    if kind is ConnectionKind.LEVI_CIVITA:
        raise UnsupportedKindError("limit geodesic curvature is provided for svk1, svk2 and adapted")
    sgn = _orient(orientation)
    cj, f = _evaluate(onc, t, 1.0)
    w = cj.omega
    eps = default_eps_h(cj.vel) if eps_h is None else eps_h
    nonh = np.abs(w) > eps
    safe_w = np.where(nonh, w, 1.0)
    k = _limit_nonhorizontal(kind, f.pbar, f.qbar, cj.vel[..., 0], cj.vel[..., 1], safe_w, True)
    return np.where(nonh, sgn * k * np.abs(w), 0.0)


def finite_L_line_density(kind, L: float, onc: OnSurfaceCurve, t, *, orientation: int = 1,
                          table=None) -> np.ndarray:
    """``k^{L,s} |g'|_L`` at many parameter values."""
    L = check_metric_param(L)
    k = geodesic_curvature_L(kind, L, onc, t, True, orientation=orientation, table=table)
    cj = onc.curve.jet(t)
    return k * np.sqrt(inner_L(L, cj.frame_vel, cj.frame_vel))


