"""Implicit surfaces: adapted frame, second fundamental forms, curvatures.

A surface is the zero set of a field expression ``u``.  With ``p = X1 u``,
``q = X2 u``, ``X3u = d u/d x3`` and ``r = X3u / sqrt(L)`` the frame at a
non-characteristic point is::

    v_L = (p X1 + q X2 + r X3~) / l_L          (unit normal)
    e1  = qbar X1 - pbar X2                    (horizontal tangent)
    e2  = rbar_L (pbar X1 + qbar X2) - (l / l_L) X3~

where ``X3~ = X3 / sqrt(L)``, ``l = |(p, q)|``, ``l_L = |(p, q, r)|``,
``pbar = p / l`` and ``rbar_L = r / l_L``.

Derivatives of these quantities along the frame come from first-order jets
built out of the gradient and Hessian of ``u``.  The second fundamental form
is computed from its definition ``h_ij = <nabla_{e_i} v_L, e_j>_L``; the
closed-form tables are kept alongside as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import expr as ex
from .connections import ConnectionKind, coeff_table, sectional
from .errors import CharacteristicPointError, NumericContractError, OffSurfaceError, UnsupportedKindError
from .heisenberg import check_metric_param, frame_fields, inner_L
from .jet import Jet2

EPS_ON_SURFACE = 1e-8
EPS_CHAR = 1e-8
FRAME_TOL = 1e-10


@dataclass(frozen=True)
class ImplicitSurface:
    """Zero set of ``u`` with an optional chart ``(s1, s2) -> (x1, x2, x3)``."""

    u: ex.Expr
    chart: tuple | None = None

    @classmethod
    def from_strings(cls, u: str, chart=None) -> "ImplicitSurface":
        ue = ex.parse(u, ex.FIELD_VARS)
        ce = None if chart is None else tuple(ex.parse(c, ex.CHART_VARS) for c in chart)
        if ce is not None and len(ce) != 3:
            raise ex.ExprError("a chart needs three components")
        return cls(ue, ce)


def _as_u(u) -> ex.Expr:
    if isinstance(u, ImplicitSurface):
        return u.u
    if isinstance(u, str):
        return ex.parse(u, ex.FIELD_VARS)
    return u


def _first_index(mask) -> tuple:
    mask = np.asarray(mask)
    if mask.ndim == 0:
        return ()
    return tuple(int(i[0]) for i in np.nonzero(mask))


class HorizontalData:
    """L-independent quantities at a batch of non-characteristic points."""

    def __init__(self, u, point, *, check_on_surface: bool = True, eps_char: float = EPS_CHAR):
        u = _as_u(u)
        point = np.asarray(point, dtype=float)
        jet = ex.eval_jet(u, point)
        grad = jet.d
        hess = jet.hessian
        gnorm = np.linalg.norm(grad, axis=-1)
        if check_on_surface:
            off = np.abs(jet.v) > EPS_ON_SURFACE * (1.0 + gnorm)
            if np.any(off):
                idx = _first_index(off)
                raise OffSurfaceError(point[idx], jet.v[idx])

        x1 = Jet2.variable(point[..., 0], 0)
        x2 = Jet2.variable(point[..., 1], 1)
        u1, u2, u3 = (Jet2.first_order(grad[..., c], hess[..., c, :]) for c in range(3))
        self.point = point
        self.u_value = jet.v
        self.grad = grad
        self.p = u1 - x2 * u3 * 0.5
        self.q = u2 + x1 * u3 * 0.5
        self.x3u = u3
        l2 = self.p * self.p + self.q * self.q
        char = np.sqrt(l2.v) <= eps_char * (1.0 + gnorm)
        if np.any(char):
            idx = _first_index(char)
            raise CharacteristicPointError(point[idx], np.sqrt(l2.v[idx]))
        self.l = l2.sqrt()
        self.pbar = self.p / self.l
        self.qbar = self.q / self.l
        self._fields = frame_fields(point)

    @property
    def e1(self) -> np.ndarray:
        z = np.zeros_like(self.pbar.v)
        return np.stack([self.qbar.v, -self.pbar.v, z], axis=-1)

    def X(self, a: int, f: Jet2) -> np.ndarray:
        """Derivative of the jet ``f`` along ``X_{a+1}``."""
        return np.sum(self._fields[..., a, :] * f.d, axis=-1)

    def grad_frame(self, f: Jet2) -> np.ndarray:
        """``(X1 f, X2 f, X3 f)`` in the last axis."""
        return np.einsum("...ac,...c->...a", self._fields, f.d)

    def horizontal_pairing(self, e, f: Jet2) -> np.ndarray:
        """``<e, grad_H f>`` using only the horizontal part of ``e``."""
        return e[..., 0] * self.X(0, f) + e[..., 1] * self.X(1, f)

    def horizontal_mean_curvature(self) -> np.ndarray:
        """``X1(pbar) + X2(qbar)``."""
        return self.X(0, self.pbar) + self.X(1, self.qbar)


def horizontal_gradient(u, x):
    """Plain-array ``u``, ``(p, q)``, its coordinate Jacobian and ``|grad u|`` at ``x``.

    No surface or characteristic checks; used for scanning and root finding.
    """
    jet = ex.eval_jet(_as_u(u), x)
    g, H = jet.d, jet.hessian
    x1, x2 = x[..., 0], x[..., 1]
    p = g[..., 0] - 0.5 * x2 * g[..., 2]
    q = g[..., 1] + 0.5 * x1 * g[..., 2]
    dp = H[..., 0, :] - 0.5 * x2[..., None] * H[..., 2, :]
    dp[..., 1] -= 0.5 * g[..., 2]
    dq = H[..., 1, :] + 0.5 * x1[..., None] * H[..., 2, :]
    dq[..., 0] += 0.5 * g[..., 2]
    return jet.v, np.stack([p, q], axis=-1), np.stack([dp, dq], axis=-2), np.linalg.norm(g, axis=-1)


@dataclass(frozen=True)
class SurfaceFrame:
    point: np.ndarray
    L: float
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    l: np.ndarray
    l_L: np.ndarray
    pbar: np.ndarray
    qbar: np.ndarray
    pbar_L: np.ndarray
    qbar_L: np.ndarray
    rbar_L: np.ndarray
    x3u: np.ndarray
    v_L: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    data: HorizontalData

    def gram(self) -> np.ndarray:
        vecs = (self.v_L, self.e1, self.e2)
        return np.stack(
            [np.stack([inner_L(self.L, a, b) for b in vecs], axis=-1) for a in vecs], axis=-2
        )

    def jets(self) -> dict:
        """First-order jets of ``r``, ``l_L``, ``rbar_L`` and ``r / l``."""
        d = self.data
        r = d.x3u * (1.0 / np.sqrt(self.L))
        lL = (d.p * d.p + d.q * d.q + r * r).sqrt()
        return {"r": r, "l_L": lL, "rbar_L": r / lL, "r_over_l": r / d.l}


def surface_frame(u, point, L: float, *, check_on_surface: bool = True, eps_char: float = EPS_CHAR) -> SurfaceFrame:
    """Frame and scalar symbols of the surface ``u = 0`` at ``point``."""
    L = check_metric_param(L)
    d = HorizontalData(u, point, check_on_surface=check_on_surface, eps_char=eps_char)
    sqrtL = np.sqrt(L)
    p, q, x3u = d.p.v, d.q.v, d.x3u.v
    r = x3u / sqrtL
    l = d.l.v
    lL = np.sqrt(p * p + q * q + r * r)
    pbar, qbar = d.pbar.v, d.qbar.v
    rbar = r / lL
    z = np.zeros_like(p)
    v_L = np.stack([p / lL, q / lL, rbar / sqrtL], axis=-1)
    e1 = np.stack([qbar, -pbar, z], axis=-1)
    e2 = np.stack([rbar * pbar, rbar * qbar, -(l / lL) / sqrtL], axis=-1)
    frame = SurfaceFrame(d.point, L, p, q, r, l, lL, pbar, qbar, p / lL, q / lL, rbar, x3u, v_L, e1, e2, d)
    _check_frame(frame)
    return frame


def _check_frame(frame: SurfaceFrame) -> None:
    unit = np.abs(frame.pbar**2 + frame.qbar**2 - 1.0)
    defect = np.abs(frame.gram() - np.eye(3))
    if np.any(unit > 1e-12) or np.any(defect > FRAME_TOL):
        raise NumericContractError(
            f"surface frame not orthonormal (defect {np.max(defect):.3g}, |pbar,qbar| defect {np.max(unit):.3g})"
        )


def _frame(u, point, L, frame) -> SurfaceFrame:
    return frame if frame is not None else surface_frame(u, point, L)


def second_fundamental_form(kind, L: float, u=None, point=None, *, frame: SurfaceFrame | None = None, table=None) -> np.ndarray:
    """``h_ij = <nabla_{e_i} v_L, e_j>_L``; shape ``(..., 2, 2)``."""
    L = check_metric_param(L)
    f = _frame(u, point, L, frame)
    if table is None:
        table = coeff_table(kind, L)
    d = f.data
    lL = f.jets()["l_L"]
    normal = [d.p / lL, d.q / lL, d.x3u * (1.0 / L) / lL]
    # dv[..., a, k] = X_a(v^k)
    dv = np.stack([d.grad_frame(vk) for vk in normal], axis=-1)
    v = f.v_L
    rows = []
    for e in (f.e1, f.e2):
        nabla = np.einsum("...a,...ak->...k", e, dv) + np.einsum("...a,...b,abk->...k", e, v, table)
        rows.append(np.stack([inner_L(L, nabla, f.e1), inner_L(L, nabla, f.e2)], axis=-1))
    return np.stack(rows, axis=-2)


def second_fundamental_form_closed_form(kind, L: float, u=None, point=None, *, frame: SurfaceFrame | None = None) -> np.ndarray:
    """Closed-form tables for SVK1, SVK2 and ADAPTED."""
    kind = ConnectionKind.parse(kind)
    L = check_metric_param(L)
    f = _frame(u, point, L, frame)
    d = f.data
    jets = f.jets()
    sL = np.sqrt(L)
    l, lL, rb, pb, qb, qbL = f.l, f.l_L, f.rbar_L, f.pbar, f.qbar, f.qbar_L

    h11 = (l / lL) * d.horizontal_mean_curvature()
    h12 = -(lL / l) * d.horizontal_pairing(f.e1, jets["rbar_L"])
    h21 = h12.copy()
    h22 = -(l**2 / lL**2) * d.horizontal_pairing(f.e2, jets["r_over_l"]) + d.X(2, jets["rbar_L"]) / sL
    if kind is ConnectionKind.SVK1:
        h21 = h21 - sL / 2 - sL / 2 * rb**2
    elif kind is ConnectionKind.SVK2:
        h11 = h11 + sL * pb * qb * rb / 2
        h12 = h12 - rb**2 * qb**2 * sL / 2 - l / (2 * lL) * qb * qbL * sL
        h21 = h21 - sL / 2 + sL / 2 * l**2 / lL**2 - sL / 2 * rb**2 * qb**2
        h22 = h22 - sL / 2 * (l / lL) * pb * qbL * rb - sL / 2 * pb * qb * rb**3
    elif kind is ConnectionKind.ADAPTED:
        h21 = h21 - sL / 2 + sL / 2 * l**2 / lL**2 - sL / 2 * rb**2
    else:
        raise UnsupportedKindError("closed-form second fundamental form covers svk1, svk2 and adapted")
    return np.stack([np.stack([h11, h12], axis=-1), np.stack([h21, h22], axis=-1)], axis=-2)


def mean_curvature_L(kind, L: float, u=None, point=None, *, frame=None) -> np.ndarray:
    II = second_fundamental_form(kind, L, u, point, frame=frame)
    return II[..., 0, 0] + II[..., 1, 1]


def mean_curvature_limit(kind, u, point) -> np.ndarray:
    """``X1(pbar) + X2(qbar)``, the same for every connection."""
    ConnectionKind.parse(kind)
    return HorizontalData(u, point).horizontal_mean_curvature()


@dataclass(frozen=True)
class ShapeOperatorReport:
    II: np.ndarray
    H_L: np.ndarray
    K_amb: np.ndarray
    K_surf: np.ndarray


def gauss_curvature_L(kind, L: float, u=None, point=None, *, frame=None, table=None) -> ShapeOperatorReport:
    """Gauss equation: ambient sectional term plus det II."""
    L = check_metric_param(L)
    f = _frame(u, point, L, frame)
    if table is None:
        table = coeff_table(kind, L)
    II = second_fundamental_form(kind, L, frame=f, table=table)
    K_amb = sectional(kind, L, f.e1, f.e2, table=table)
    det = II[..., 0, 0] * II[..., 1, 1] - II[..., 0, 1] * II[..., 1, 0]
    return ShapeOperatorReport(II, II[..., 0, 0] + II[..., 1, 1], K_amb, K_amb + det)


def gauss_curvature_limit(kind, u, point, *, data: HorizontalData | None = None) -> np.ndarray:
    """Sub-Riemannian limit of the surface Gauss curvature."""
    kind = ConnectionKind.parse(kind)
    if kind is ConnectionKind.LEVI_CIVITA:
        raise UnsupportedKindError("the Levi-Civita limit Gauss curvature is not provided")
    d = data if data is not None else HorizontalData(u, point)
    if kind is ConnectionKind.ADAPTED:
        return np.zeros_like(d.l.v)
    ratio = d.x3u / d.l
    bracket = d.horizontal_pairing(d.e1, ratio)
    x3u, l2 = d.x3u.v, d.l.v**2
    if kind is ConnectionKind.SVK1:
        return -0.5 * bracket - x3u**2 / (2 * l2)
    pb, qb = d.pbar.v, d.qbar.v
    return -(pb * qb * x3u) / (2 * d.l.v) * d.horizontal_mean_curvature() - qb**2 / 2 * (
        bracket + x3u**2 / l2
    )


SurfaceLike = Union[str, ex.Expr, ImplicitSurface]
