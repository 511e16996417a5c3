"""Curvature of space curves for each connection and its L -> infinity limit."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import expr as ex
from .connections import ConnectionKind, coeff_table, covariant_derivative
from .errors import NonRegularCurveError, NumericContractError, UnsupportedKindError
from .heisenberg import check_metric_param, inner_L, omega, omega_dot

EPS_REG = 1e-12
CLAMP_TOL = 1e-12


class Branch(enum.Enum):
    NON_HORIZONTAL = "NonHorizontal"
    HORIZONTAL_FINITE = "HorizontalFinite"
    HORIZONTAL_DIVERGENT = "HorizontalDivergent"


class MarginalClassificationWarning(UserWarning):
    """A horizontality test landed within three decades of its threshold."""


@dataclass(frozen=True)
class ParamCurve:
    components: tuple
    interval: tuple = (0.0, 2.0 * np.pi)

    @classmethod
    def from_strings(cls, sources: Sequence[str], interval=(0.0, 2.0 * np.pi)) -> "ParamCurve":
        if isinstance(sources, str):
            sources = split_components(sources)
        if len(sources) != 3:
            raise ex.ExprError(f"a curve needs three components, got {len(sources)}")
        return cls(tuple(ex.parse(s, ex.CURVE_VARS) for s in sources), tuple(map(float, interval)))

    def source(self) -> list[str]:
        return [ex.to_source(c) for c in self.components]

    def jet(self, t) -> "CurveJet":
        pos, vel, acc = ex.eval_curve_jet(self.components, t)
        return CurveJet.from_coordinates(np.asarray(t, dtype=float), pos, vel, acc)

    def reversed(self) -> "ParamCurve":
        """Same track traversed backwards: ``t -> a + b - t``."""
        a, b = self.interval
        shift = ex.BinOp("-", ex.Num(a + b), ex.Var("t"))
        return ParamCurve(tuple(_substitute(c, "t", shift) for c in self.components), self.interval)


def _substitute(e, name, replacement):
    if isinstance(e, ex.Var):
        return replacement if e.name == name else e
    if isinstance(e, (ex.Num, ex.Const)):
        return e
    if isinstance(e, ex.Neg):
        return ex.Neg(_substitute(e.operand, name, replacement))
    if isinstance(e, ex.Call):
        return ex.Call(e.func, _substitute(e.arg, name, replacement))
    if isinstance(e, ex.Pow):
        return ex.Pow(_substitute(e.base, name, replacement), e.exponent)
    return ex.BinOp(e.op, _substitute(e.left, name, replacement), _substitute(e.right, name, replacement))


def split_components(text: str) -> list[str]:
    """Split ``"a, b, c"`` on top-level commas."""
    parts, depth, start = [], 0, 0
    for i, c in enumerate(text):
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif c == "," and depth == 0:
            parts.append(text[start:i].strip())
            start = i + 1
    parts.append(text[start:].strip())
    return parts


@dataclass(frozen=True)
class CurveJet:
    """Curve data at one or more parameter values.

    ``frame_vel`` is ``(g1', g2', w(g'))`` and ``frame_acc`` its t-derivative
    ``(g1'', g2'', d/dt w(g'))``.
    """

    t: np.ndarray
    pos: np.ndarray
    vel: np.ndarray
    acc: np.ndarray
    omega: np.ndarray
    omega_dot: np.ndarray

    @classmethod
    def from_coordinates(cls, t, pos, vel, acc) -> "CurveJet":
        return cls(t, pos, vel, acc, omega(pos, vel), omega_dot(pos, vel, acc))

    @property
    def frame_vel(self) -> np.ndarray:
        return np.stack([self.vel[..., 0], self.vel[..., 1], self.omega], axis=-1)

    @property
    def frame_acc(self) -> np.ndarray:
        return np.stack([self.acc[..., 0], self.acc[..., 1], self.omega_dot], axis=-1)

    @property
    def speed(self) -> np.ndarray:
        return np.linalg.norm(self.vel, axis=-1)

    def require_regular(self, eps: float = EPS_REG) -> None:
        bad = self.speed <= eps
        if np.any(bad):
            idx = np.flatnonzero(np.ravel(bad))[0]
            raise NonRegularCurveError(np.ravel(self.t)[idx] if self.t.ndim else self.t, np.ravel(self.speed)[idx])


def _as_jet(curve, t) -> CurveJet:
    if isinstance(curve, CurveJet):
        return curve
    if not isinstance(curve, ParamCurve):
        curve = ParamCurve.from_strings(curve)
    return curve.jet(t)


def self_acceleration(kind, L: float, cj: CurveJet, table=None) -> np.ndarray:
    """``nabla_{g'} g'`` in frame coefficients."""
    if table is None:
        table = coeff_table(kind, L)
    fv = cj.frame_vel
    return covariant_derivative(table, fv, fv, cj.frame_acc)


def covariant_along_curve(kind, L: float, curve, t, field=None, table=None) -> np.ndarray:
    """Covariant derivative along the curve of a frame field.

    ``field`` is ``None`` for the velocity itself, or three expressions in
    ``t`` giving the frame coefficients of the field.
    """
    cj = _as_jet(curve, t)
    if table is None:
        table = coeff_table(kind, L)
    if field is None:
        return self_acceleration(kind, L, cj, table)
    _, V, Vdot = ex.eval_curve_jet(field, cj.t)
    return covariant_derivative(table, cj.frame_vel, V, Vdot)


def clamped_sqrt(radicand, scale) -> np.ndarray:
    """Square root with a Cauchy-Schwarz roundoff clamp; see ``CLAMP_TOL``."""
    radicand = np.asarray(radicand, dtype=float)
    floor = -CLAMP_TOL * np.maximum(1.0, np.abs(scale))
    if np.any(radicand < floor):
        raise NumericContractError(
            f"negative curvature radicand {np.min(radicand):.3g} beyond the clamp tolerance"
        )
    return np.sqrt(np.maximum(radicand, 0.0))


def curvature_from_acceleration(L: float, c, vel) -> np.ndarray:
    """``sqrt(|c|^2/|v|^4 - <c, v>^2/|v|^6)`` in the g_L metric."""
    v2 = inner_L(L, vel, vel)
    first = inner_L(L, c, c) / v2**2
    second = inner_L(L, c, vel) ** 2 / v2**3
    return clamped_sqrt(first - second, first)


def curve_curvature_L(kind, L: float, curve, t=None, table=None) -> np.ndarray:
    """Curvature of the curve at parameter ``t`` for the connection ``kind``."""
    L = check_metric_param(L)
    cj = _as_jet(curve, t)
    cj.require_regular()
    c = self_acceleration(kind, L, cj, table)
    return curvature_from_acceleration(L, c, cj.frame_vel)


def curve_curvature_closed_form(kind, L: float, curve, t=None) -> np.ndarray:
    """Component-wise closed forms for SVK1, SVK2 and ADAPTED."""
    kind = ConnectionKind.parse(kind)
    L = check_metric_param(L)
    cj = _as_jet(curve, t)
    cj.require_regular()
    g1, g2 = cj.vel[..., 0], cj.vel[..., 1]
    a1, a2 = cj.acc[..., 0], cj.acc[..., 1]
    w, wd = cj.omega, cj.omega_dot
    if kind is ConnectionKind.SVK1:
        A = a1 + L * w * g2 / 2
        B = a2 - L * w * g1 / 2
        C = wd
    elif kind is ConnectionKind.SVK2:
        A = a1
        B = a2 - L * w * g1 / 2
        C = wd + g1 * g2 / 2
    elif kind is ConnectionKind.ADAPTED:
        A, B, C = a1, a2, wd
    else:
        raise UnsupportedKindError(f"no closed-form curve curvature for {kind.value}")
    speed2 = g1**2 + g2**2 + L * w**2
    first = (A**2 + B**2 + L * C**2) / speed2**2
    second = (g1 * A + g2 * B + L * w * C) ** 2 / speed2**3
    return clamped_sqrt(first - second, first)


@dataclass(frozen=True)
class CurveLimitResult:
    """Limit curvature; for the divergent branch ``value`` is lim k/sqrt(L)."""

    branch: Branch
    value: float
    marginal: bool = False
    omega: float = 0.0
    discriminator: float = 0.0


def horizontal_discriminator(kind, cj: CurveJet) -> np.ndarray:
    """Second horizontality test: d/dt w(g'), plus g1' g2'/2 for SVK2."""
    kind = ConnectionKind.parse(kind)
    if kind is ConnectionKind.SVK2:
        return cj.omega_dot + cj.vel[..., 0] * cj.vel[..., 1] / 2
    return cj.omega_dot


def default_eps_h(vel) -> np.ndarray:
    return 1e-9 * (1.0 + np.linalg.norm(vel, axis=-1))


def _is_marginal(x, eps) -> bool:
    return bool(eps <= abs(x) <= 1e3 * eps)


def curve_curvature_limit(kind, curve, t=None, eps_h: float | None = None) -> CurveLimitResult:
    """Sub-Riemannian limit of the curve curvature at a single parameter value."""
    kind = ConnectionKind.parse(kind)
    if kind is ConnectionKind.LEVI_CIVITA:
        raise UnsupportedKindError("limit curve curvature is provided for svk1, svk2 and adapted")
    cj = _as_jet(curve, t)
    if np.ndim(cj.t) != 0:
        raise ValueError("curve_curvature_limit takes a single parameter value")
    cj.require_regular()
    g1, g2 = float(cj.vel[0]), float(cj.vel[1])
    a1, a2 = float(cj.acc[0]), float(cj.acc[1])
    w = float(cj.omega)
    disc = float(horizontal_discriminator(kind, cj))
    eps = float(default_eps_h(cj.vel)) if eps_h is None else float(eps_h)
    hnorm2 = g1 * g1 + g2 * g2

    marginal = False
    if abs(w) > eps:
        marginal = _is_marginal(w, eps)
        branch = Branch.NON_HORIZONTAL
        if kind is ConnectionKind.SVK1:
            value = np.sqrt(hnorm2) / (2 * abs(w))
        elif kind is ConnectionKind.SVK2:
            value = abs(g1) / (2 * abs(w))
        else:
            value = 0.0
    elif abs(disc) <= eps:
        branch = Branch.HORIZONTAL_FINITE
        value = horizontal_finite_curvature(g1, g2, a1, a2, kind)
    else:
        marginal = _is_marginal(disc, eps)
        branch = Branch.HORIZONTAL_DIVERGENT
        value = abs(disc) / hnorm2
    if marginal:
        warnings.warn(
            f"horizontality classification at t={float(cj.t):.6g} is within 1e3*eps_h of the threshold",
            MarginalClassificationWarning,
            stacklevel=2,
        )
    return CurveLimitResult(branch, float(value), marginal, w, disc)


def horizontal_finite_curvature(g1, g2, a1, a2, kind) -> float:
    """Planar curvature of the horizontal projection (same display for every kind)."""
    return abs(a1 * g2 - a2 * g1) / (g1 * g1 + g2 * g2) ** 1.5
