"""Randomised two-path property suite.

Each property compares two independent computations of the same quantity on
seeded random samples and records the worst deviation.  Deviations are
measured as ``|a - b| / (1 + max(|a|, |b|))`` unless stated otherwise.

The samplers are public so the test suite can reuse them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import expr as ex
from .connections import ConnectionKind, coeff_table, curvature_from_table, covariant_derivative
from .curves import (
    Branch,
    ParamCurve,
    curve_curvature_closed_form,
    curve_curvature_L,
    curve_curvature_limit,
)
from .errors import NonRegularCurveError
from .heisenberg import inner_L
from .surface_curves import (
    OnSurfaceCurve,
    geodesic_curvature_L_pair,
    geodesic_curvature_limit_arrays,
    projected_acceleration,
    projected_acceleration_expansion,
)
from .surfaces import (
    gauss_curvature_L,
    gauss_curvature_limit,
    mean_curvature_limit,
    second_fundamental_form,
    second_fundamental_form_closed_form,
    horizontal_gradient,
    surface_frame,
)

PAPER_KINDS = (ConnectionKind.SVK1, ConnectionKind.SVK2, ConnectionKind.ADAPTED)
ALL_KINDS = tuple(ConnectionKind)
LIMIT_L = 1e8

TOL_CURVE = 1e-10
TOL_SFF = 1e-9
TOL_PROJ = 1e-10
TOL_METRIC = 1e-10
TOL_LIMIT = 1e-3
TOL_JET_GRAD = 1e-6
TOL_JET_HESS = 1e-4
FD_STEP = 1e-4


def deviation(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = 1.0 + np.maximum(np.abs(a), np.abs(b))
    return float(np.max(np.abs(a - b) / scale))


# -- samplers ----------------------------------------------------------------

def _c(rng, lo=-1.0, hi=1.0) -> str:
    return f"({rng.uniform(lo, hi)!r})"


def random_curve_sources(rng) -> list[str]:
    """Three smooth components in ``t``: quadratic plus a sine."""
    return [
        f"{_c(rng)} + {_c(rng)}*t + {_c(rng)}*t^2 + {_c(rng)}*sin({_c(rng, 0.5, 2.0)}*t)"
        for _ in range(3)
    ]


def random_curve(rng) -> ParamCurve:
    return ParamCurve.from_strings(random_curve_sources(rng), (-1.0, 1.0))


def random_metric_param(rng) -> float:
    return float(10.0 ** rng.uniform(-2, 2))


CANDIDATES = 16


@dataclass(frozen=True)
class RandomSurface:
    """``u = 0`` written as a graph ``x_k = F(others)``, possibly wrapped."""

    u: str
    graph: str  # F with {a}, {b} placeholders for the two free coordinates
    axis: int  # coordinate solved for (0 or 2)

    def free_axes(self) -> tuple:
        return (1, 2) if self.axis == 0 else (0, 1)

    def points(self, ab) -> np.ndarray:
        """Surface points over free-coordinate pairs ``ab[..., 2]``."""
        ab = np.asarray(ab, dtype=float)
        F = ex.parse(self.graph.format(a="s1", b="s2"), ex.CHART_VARS)
        value = ex.evaluate(F, {"s1": ab[..., 0], "s2": ab[..., 1]})
        p = np.empty(ab.shape[:-1] + (3,))
        i, j = self.free_axes()
        p[..., i], p[..., j], p[..., self.axis] = ab[..., 0], ab[..., 1], value
        return p

    def curve(self, alpha: str, beta: str) -> list[str]:
        comps = [""] * 3
        i, j = self.free_axes()
        comps[i], comps[j] = alpha, beta
        comps[self.axis] = self.graph.format(a=f"({alpha})", b=f"({beta})")
        return comps


def random_surface(rng) -> RandomSurface:
    coeffs = [_c(rng) for _ in range(6)]
    graph = (
        f"{coeffs[0]}*{{a}} + {coeffs[1]}*{{b}} + {coeffs[2]}*{{a}}^2 + {coeffs[3]}*{{a}}*{{b}}"
        f" + {coeffs[4]}*{{b}}^2 + {coeffs[5]}*sin({_c(rng, 0.5, 2.0)}*{{a}} + {_c(rng)}*{{b}})"
    )
    axis = int(rng.choice([0, 2], p=[0.3, 0.7]))
    names = ("x1", "x2", "x3")
    free = (1, 2) if axis == 0 else (0, 1)
    zero = f"{names[axis]} - ({graph.format(a=names[free[0]], b=names[free[1]])})"
    wrap = int(rng.integers(3))
    if wrap == 1:
        zero = f"exp({_c(rng, 0.5, 1.5)}*({zero})) - 1"
    elif wrap == 2:
        zero = f"({zero})*(2 + cos(x1 + x2))"
    return RandomSurface(zero, graph, axis)


def _away_from_characteristic(u, x, min_l: float) -> np.ndarray:
    _, pq, _, gnorm = horizontal_gradient(u, x)
    return np.linalg.norm(pq, axis=-1) > min_l * (1.0 + gnorm)


def random_surface_point(rng, count: int = 1, min_l: float = 0.05):
    """A random surface and ``count`` points on it away from characteristic points."""
    while True:
        s = random_surface(rng)
        u = ex.parse(s.u, ex.FIELD_VARS)
        pts = s.points(rng.uniform(-1, 1, (CANDIDATES, 2)))
        ok = np.flatnonzero(_away_from_characteristic(u, pts, min_l))
        if ok.size >= count:
            return s, pts[ok[:count]] if count > 1 else pts[ok[0]]


def random_surface_curve(rng, count: int = 1, min_l: float = 0.05, min_omega: float = 0.0):
    """A random curve lying on a random surface, with sample parameters.

    Parameters are drawn from a batch of candidates, keeping those with
    non-negligible speed, away from characteristic points and with
    ``|w(g')| >= min_omega``.  ``count == 1`` returns a scalar parameter.
    """
    while True:
        s = random_surface(rng)
        alpha = f"{_c(rng)} + {_c(rng)}*t + {_c(rng)}*t^2"
        beta = f"{_c(rng)} + {_c(rng)}*t + {_c(rng)}*sin(t)"
        onc = OnSurfaceCurve.from_strings(s.u, s.curve(alpha, beta), (-1.0, 1.0))
        t = rng.uniform(-1, 1, CANDIDATES)
        cj = onc.curve.jet(t)
        ok = (cj.speed > 0.05) & (np.abs(cj.omega) >= min_omega)
        ok &= _away_from_characteristic(onc.u, cj.pos, min_l)
        idx = np.flatnonzero(ok)
        if idx.size >= count:
            return onc, (t[idx[:count]] if count > 1 else float(t[idx[0]]))


_UNARY = (
    "sin({})", "cos({})", "atan({})", "exp(sin({}))", "sqrt(1 + ({})^2)", "log(2 + sin({}))",
    "sinh(0.5*sin({}))", "cosh(0.5*cos({}))", "abs(2 + sin({}))", "tan(0.5*sin({}))",
)
_BINARY = ("({} + {})", "({} - {})", "({} * {})", "({} / (2 + cos({})))")


def random_field_expression(rng, depth: int = 4) -> str:
    """A random field expression that is smooth on all of R^3."""
    if depth == 0 or rng.random() < 0.2:
        if rng.random() < 0.75:
            return str(rng.choice(["x1", "x2", "x3"]))
        return f"{rng.uniform(-1, 1):.6g}"
    r = rng.random()
    if r < 0.4:
        return rng.choice(_UNARY).format(random_field_expression(rng, depth - 1))
    if r < 0.55:
        # powers of leaves only, so derivatives stay moderate
        # and a fixed finite-difference step resolves them
        return f"({random_field_expression(rng, 0)})^{int(rng.integers(2, 4))}"
    return rng.choice(_BINARY).format(random_field_expression(rng, depth - 1),
                                      random_field_expression(rng, depth - 1))


def finite_difference_jet(e, p, h: float = FD_STEP):
    """Central-difference gradient and Hessian of the plain evaluator."""
    p = np.asarray(p, dtype=float)
    eye = np.eye(3) * h

    def f(q):
        q = np.asarray(q)
        return np.asarray(ex.evaluate(e, {"x1": q[..., 0], "x2": q[..., 1], "x3": q[..., 2]}), dtype=float)

    f0 = f(p)
    grad = np.array([(f(p + eye[i]) - f(p - eye[i])) / (2 * h) for i in range(3)])
    hess = np.empty((3, 3))
    for i in range(3):
        hess[i, i] = (f(p + eye[i]) - 2 * f0 + f(p - eye[i])) / h**2
        for j in range(i + 1, 3):
            hess[i, j] = hess[j, i] = (
                f(p + eye[i] + eye[j]) - f(p + eye[i] - eye[j]) - f(p - eye[i] + eye[j]) + f(p - eye[i] - eye[j])
            ) / (4 * h * h)
    return f0, grad, hess


# -- properties --------------------------------------------------------------

@dataclass
class PropertyResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    samples: int
    detail: str = ""


@dataclass
class VerifyContext:
    """Knobs shared by all properties; ``tables`` can replace coefficient tables."""

    samples: int
    tables: dict = field(default_factory=dict)

    def table(self, kind, L):
        kind = ConnectionKind.parse(kind)
        if kind in self.tables:
            return np.asarray(self.tables[kind](L), dtype=float)
        return coeff_table(kind, L)


def _run(name, tol, samples, fn, batch: int = 1) -> PropertyResult:
    """Call ``fn(k)`` on draws of ``k <= batch`` samples until ``samples`` are done."""
    worst, detail, done = 0.0, "", 0
    while done < samples:
        k = min(batch, samples - done)
        dev, what = fn(k)
        done += k
        if dev > worst or not np.isfinite(dev):
            worst, detail = dev, what
    return PropertyResult(name, bool(worst <= tol), worst, tol, samples, detail if worst > tol else "")


# points evaluated per random curve or surface
BATCH = 4


def prop_curve_closed_forms(rng, ctx: VerifyContext, kind) -> PropertyResult:
    def draw(k):
        while True:
            c, t, L = random_curve(rng), rng.uniform(-1, 1, k), random_metric_param(rng)
            try:
                a = curve_curvature_closed_form(kind, L, c, t)
            except NonRegularCurveError:
                continue
            b = curve_curvature_L(kind, L, c, t, table=ctx.table(kind, L))
            return deviation(a, b), f"curve {c.source()} t={t.tolist()} L={L!r}"
    return _run(f"curve-closed-form[{kind.value}]", TOL_CURVE, ctx.samples, draw, BATCH)


def prop_sff_closed_forms(rng, ctx: VerifyContext, kind) -> PropertyResult:
    def draw(k):
        s, p = random_surface_point(rng, k)
        L = random_metric_param(rng)
        f = surface_frame(s.u, p, L)
        a = second_fundamental_form_closed_form(kind, L, frame=f)
        b = second_fundamental_form(kind, L, frame=f, table=ctx.table(kind, L))
        return deviation(a, b), f"u={s.u} p={np.asarray(p).tolist()} L={L!r}"
    return _run(f"second-fundamental-form[{kind.value}]", TOL_SFF, ctx.samples, draw, BATCH)


def prop_projected_acceleration(rng, ctx: VerifyContext, kind) -> PropertyResult:
    def draw(k):
        onc, t = random_surface_curve(rng, k)
        L = random_metric_param(rng)
        a = projected_acceleration_expansion(kind, L, onc, t)
        b = projected_acceleration(kind, L, onc, t, table=ctx.table(kind, L))
        return deviation(a, b), f"curve {onc.curve.source()} t={np.asarray(t).tolist()} L={L!r}"
    return _run(f"projected-acceleration[{kind.value}]", TOL_PROJ, ctx.samples, draw, BATCH)


def prop_metric_compatibility(rng, ctx: VerifyContext, kind) -> PropertyResult:
    """``d/dt <V, W> = <nabla V, W> + <V, nabla W>`` along random curves.

    One sample is one curve with two random fields, checked at 8 parameters.
    """
    def draw(_):
        c, L = random_curve(rng), random_metric_param(rng)
        t = rng.uniform(-1, 1, 8)
        cj = c.jet(t)
        _, V, Vd = ex.eval_curve_jet(random_curve_sources(rng), t)
        _, W, Wd = ex.eval_curve_jet(random_curve_sources(rng), t)
        table = ctx.table(kind, L)
        nV = covariant_derivative(table, cj.frame_vel, V, Vd)
        nW = covariant_derivative(table, cj.frame_vel, W, Wd)
        lhs = inner_L(L, Vd, W) + inner_L(L, V, Wd)
        a, b = inner_L(L, nV, W), inner_L(L, V, nW)
        scale = 1.0 + np.abs(lhs) + np.abs(a) + np.abs(b)
        return float(np.max(np.abs(lhs - a - b) / scale)), f"curve {c.source()} L={L!r}"
    return _run(f"metric-compatibility[{kind.value}]", TOL_METRIC, ctx.samples, draw)


def prop_curvature_antisymmetry(rng, ctx: VerifyContext, kind) -> PropertyResult:
    def draw(_):
        L = random_metric_param(rng)
        R = curvature_from_table(ctx.table(kind, L))
        return float(np.max(np.abs(R + np.transpose(R, (1, 0, 2, 3))))), f"L={L!r}"
    return _run(f"curvature-antisymmetry[{kind.value}]", 0.0, ctx.samples, draw)


def prop_curve_limits(rng, ctx: VerifyContext, kind) -> PropertyResult:
    """Curve curvature at L = 1e8 against the limit on non-horizontal points."""
    def draw(k):
        while True:
            c = random_curve(rng)
            t = rng.uniform(-1, 1, CANDIDATES)
            cj = c.jet(t)
            t = t[(np.abs(cj.omega) >= 0.1) & (cj.speed > 0.05)][:k]
            if t.size == k:
                break
        lim = [curve_curvature_limit(kind, c, float(x)) for x in t]
        assert all(r.branch is Branch.NON_HORIZONTAL for r in lim)
        fin = curve_curvature_L(kind, LIMIT_L, c, t)
        return deviation(fin, [r.value for r in lim]), f"curve {c.source()} t={t.tolist()}"
    return _run(f"curve-limit[{kind.value}]", TOL_LIMIT, ctx.samples, draw, BATCH)


def prop_surface_limits(rng, ctx: VerifyContext, kind) -> PropertyResult:
    """Gauss and mean curvature at L = 1e8 against their limits."""
    def draw(k):
        s, p = random_surface_point(rng, k)
        f = surface_frame(s.u, p, LIMIT_L)
        rep = gauss_curvature_L(kind, LIMIT_L, frame=f)
        dK = deviation(rep.K_surf, gauss_curvature_limit(kind, s.u, p, data=f.data))
        dH = deviation(rep.H_L, mean_curvature_limit(kind, s.u, p))
        return max(dK, dH), f"u={s.u} p={np.asarray(p).tolist()}"
    return _run(f"surface-limit[{kind.value}]", TOL_LIMIT, ctx.samples, draw, BATCH)


def prop_geodesic_limits(rng, ctx: VerifyContext, kind) -> PropertyResult:
    """Signed and unsigned geodesic curvature at L = 1e8 against the limit."""
    def draw(k):
        onc, t = random_surface_curve(rng, k, min_omega=0.1)
        lim = geodesic_curvature_limit_arrays(kind, onc, t)
        signed, unsigned = geodesic_curvature_L_pair(kind, LIMIT_L, onc, t)
        worst = max(deviation(signed, lim.signed), deviation(unsigned, lim.unsigned))
        return worst, f"curve {onc.curve.source()} t={np.asarray(t).tolist()}"
    return _run(f"geodesic-limit[{kind.value}]", TOL_LIMIT, ctx.samples, draw, BATCH)


def prop_jets(rng, ctx: VerifyContext) -> PropertyResult:
    def draw(_):
        src = random_field_expression(rng)
        e = ex.parse(src, ex.FIELD_VARS)
        p = rng.uniform(-1, 1, 3)
        jet = ex.eval_jet(e, p)
        _, g, H = finite_difference_jet(e, p)
        dg = float(np.max(np.abs(jet.d - g) / (1 + np.abs(jet.d))) / TOL_JET_GRAD)
        dh = float(np.max(np.abs(jet.hessian - H) / (1 + np.abs(jet.hessian))) / TOL_JET_HESS)
        return max(dg, dh), f"{src} at {p.tolist()}"
    # deviations are reported in units of the respective tolerance
    return _run("jet-vs-finite-difference", 1.0, max(ctx.samples, 200), draw)


PER_KIND: tuple[tuple[Callable, tuple], ...] = (
    (prop_curve_closed_forms, PAPER_KINDS),
    (prop_sff_closed_forms, PAPER_KINDS),
    (prop_projected_acceleration, PAPER_KINDS),
    (prop_metric_compatibility, ALL_KINDS),
    (prop_curvature_antisymmetry, ALL_KINDS),
    (prop_curve_limits, PAPER_KINDS),
    (prop_surface_limits, PAPER_KINDS),
    (prop_geodesic_limits, PAPER_KINDS),
)


LABELS = {
    prop_curve_closed_forms: "curve-closed-form",
    prop_sff_closed_forms: "second-fundamental-form",
    prop_projected_acceleration: "projected-acceleration",
    prop_metric_compatibility: "metric-compatibility",
    prop_curvature_antisymmetry: "curvature-antisymmetry",
    prop_curve_limits: "curve-limit",
    prop_surface_limits: "surface-limit",
    prop_geodesic_limits: "geodesic-limit",
    prop_jets: "jet-vs-finite-difference",
}


def property_jobs() -> list[tuple[str, Callable, ConnectionKind | None]]:
    jobs = [(f"{LABELS[fn]}[{kind.value}]", fn, kind) for fn, kinds in PER_KIND for kind in kinds]
    return jobs + [(LABELS[prop_jets], prop_jets, None)]


def run_properties(seed: int = 42, samples: int = 100, *, tables: dict | None = None,
                   only: tuple = ()) -> list[PropertyResult]:
    """Run the suite.

    ``only`` keeps the properties whose name starts with one of its prefixes.
    Each property draws from its own stream seeded by ``(seed, index)``, so
    results do not depend on which properties are selected.
    """
    ctx = VerifyContext(samples, dict(tables or {}))
    results = []
    for index, (name, fn, kind) in enumerate(property_jobs()):
        if only and not any(name.startswith(o) for o in only):
            continue
        rng = np.random.default_rng([seed, index])
        results.append(fn(rng, ctx) if kind is None else fn(rng, ctx, kind))
    return results
