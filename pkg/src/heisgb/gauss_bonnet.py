"""Limit and finite-L Gauss-Bonnet integrals over charted surface patches.

A scene is a surface ``u = 0`` with a chart ``(s1, s2) -> (x1, x2, x3)`` over
a parameter rectangle or disk, plus closed boundary curves.  Interior
integrals are taken in polar coordinates about the characteristic point of
the chart when there is one, so quadrature nodes never land on it; in the
limit an excision disk of parameter radius ``rho`` is removed and the result
is extrapolated to ``rho -> 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .connections import ConnectionKind, coeff_table
from .curves import ParamCurve
from .errors import (
    IntegrationError,
    NonIntegrableSingularityError,
    OffSurfaceError,
    OrientationError,
    UnsupportedKindError,
)
from .heisenberg import check_metric_param, frame_from_coordinate, inner_L, omega
from .quadrature import DEFAULT_ABS_TOL, DEFAULT_REL_TOL, MAX_CELLS, QuadResult, integrate_1d, integrate_2d
from .surface_curves import OnSurfaceCurve, finite_L_line_density, signed_limit_line_density
from .surfaces import EPS_ON_SURFACE, HorizontalData, gauss_curvature_L, gauss_curvature_limit, horizontal_gradient

SCAN_GRID = 64
MAX_CANDIDATES = 16
CANDIDATE_FRACTION = 0.25
DEFAULT_EXCISION = 1e-2
AMBIGUOUS_ORIENTATION = 0.1
# interior values whose successive differences shrink slower than this ratio
# are treated as a non-integrable singularity
DIVERGENCE_RATIO = 0.75


@dataclass(frozen=True)
class RectDomain:
    s1a: float
    s1b: float
    s2a: float
    s2b: float

    def __post_init__(self):
        if not (self.s1a < self.s1b and self.s2a < self.s2b):
            raise ValueError("rectangle bounds must be increasing")

    @property
    def area(self) -> float:
        return (self.s1b - self.s1a) * (self.s2b - self.s2a)

    def bbox(self) -> tuple:
        return self.s1a, self.s1b, self.s2a, self.s2b

    def contains(self, s, margin: float = 0.0) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return ((s[..., 0] > self.s1a + margin) & (s[..., 0] < self.s1b - margin)
                & (s[..., 1] > self.s2a + margin) & (s[..., 1] < self.s2b - margin))

    def sectors(self, c) -> list:
        """Angular breakpoints at the corners seen from ``c``."""
        corners = [(self.s1a, self.s2a), (self.s1b, self.s2a), (self.s1b, self.s2b), (self.s1a, self.s2b)]
        angles = sorted(math.atan2(y - c[1], x - c[0]) % (2 * math.pi) for x, y in corners)
        edges = [0.0] + angles + [2 * math.pi]
        return [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b - a > 1e-14]

    def rho_max(self, c, theta) -> np.ndarray:
        ct, st = np.cos(theta), np.sin(theta)
        out = np.full(np.shape(theta), np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            for bound, comp, dirn in ((self.s1b, c[0], ct), (self.s1a, c[0], ct),
                                      (self.s2b, c[1], st), (self.s2a, c[1], st)):
                dist = (bound - comp) / dirn
                out = np.where((dist > 0) & np.isfinite(dist), np.minimum(out, dist), out)
        return out


@dataclass(frozen=True)
class DiskDomain:
    radius: float
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("disk radius must be positive")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    def bbox(self) -> tuple:
        (a, b), r = self.center, self.radius
        return a - r, a + r, b - r, b + r

    def contains(self, s, margin: float = 0.0) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        d = np.hypot(s[..., 0] - self.center[0], s[..., 1] - self.center[1])
        return d < self.radius - margin

    def sectors(self, c) -> list:
        return [(0.0, 0.5 * math.pi), (0.5 * math.pi, math.pi), (math.pi, 1.5 * math.pi), (1.5 * math.pi, 2 * math.pi)]

    def rho_max(self, c, theta) -> np.ndarray:
        dx, dy = c[0] - self.center[0], c[1] - self.center[1]
        b = dx * np.cos(theta) + dy * np.sin(theta)
        return -b + np.sqrt(b * b - (dx * dx + dy * dy - self.radius**2))


@dataclass(frozen=True)
class Scene:
    u: ex.Expr
    chart: tuple
    domain: object
    boundary: tuple
    euler_characteristic: int = 1
    name: str = "scene"

    @classmethod
    def from_strings(cls, u: str, chart, domain, boundary, euler_characteristic: int = 1,
                     name: str = "scene") -> "Scene":
        curves = tuple(b if isinstance(b, ParamCurve) else ParamCurve.from_strings(*b) for b in boundary)
        return cls(ex.parse(u, ex.FIELD_VARS), tuple(ex.parse(c, ex.CHART_VARS) for c in chart),
                   domain, curves, int(euler_characteristic), name)

    def on_surface(self, curve: ParamCurve) -> OnSurfaceCurve:
        return OnSurfaceCurve(curve, self.u)


@dataclass
class GBReport:
    kind: str
    mode: str
    L: float | None
    orientation: str
    interior: float
    interior_error: float
    boundary: list
    boundary_errors: list
    target: float
    residual: float
    residual_error: float
    excised_area_fraction: float
    node_counts: dict
    characteristic_points: list = field(default_factory=list)
    extrapolation: list = field(default_factory=list)


def chart_eval(scene: Scene, s):
    """Points and coordinate tangent vectors ``T1, T2`` of the chart at ``s``."""
    jets = [ex.eval_chart_jet(c, s) for c in scene.chart]
    x = np.stack([j.v for j in jets], axis=-1)
    T1 = np.stack([j.d[..., 0] for j in jets], axis=-1)
    T2 = np.stack([j.d[..., 1] for j in jets], axis=-1)
    return x, T1, T2


def limit_length_element(curve: ParamCurve, t) -> np.ndarray:
    """``|w(g'(t))|``."""
    return np.abs(curve.jet(t).omega)


def limit_area_density(u, x, T1, T2, data: HorizontalData | None = None) -> np.ndarray:
    """Signed pullback of ``pbar w2^w3 - qbar w1^w3`` to the chart."""
    d = data if data is not None else HorizontalData(u, x)
    w1, w2 = omega(x, T1), omega(x, T2)
    A = T1[..., 1] * w2 - T2[..., 1] * w1
    B = T1[..., 0] * w2 - T2[..., 0] * w1
    return d.pbar.v * A - d.qbar.v * B


def limit_area_element(scene: Scene, s) -> np.ndarray:
    x, T1, T2 = chart_eval(scene, s)
    return limit_area_density(scene.u, x, T1, T2)


def finite_area_element(L: float, x, T1, T2) -> np.ndarray:
    """``sqrt(det Gram_L(T1, T2))``."""
    a, b = frame_from_coordinate(x, T1), frame_from_coordinate(x, T2)
    g11, g12, g22 = inner_L(L, a, a), inner_L(L, a, b), inner_L(L, b, b)
    return np.sqrt(np.maximum(g11 * g22 - g12 * g12, 0.0))


def _scan_grid(domain):
    a, b, c, d = domain.bbox()
    s1 = np.linspace(a, b, SCAN_GRID)
    s2 = np.linspace(c, d, SCAN_GRID)
    return np.stack(np.meshgrid(s1, s2, indexing="ij"), axis=-1)


def validate_scene(scene: Scene) -> None:
    """Chart and boundary samples must lie on the surface."""
    grid = _scan_grid(scene.domain)
    inside = scene.domain.contains(grid, margin=-1e-12)
    x, _, _ = chart_eval(scene, grid[inside])
    _check_on_surface(scene.u, x)
    for curve in scene.boundary:
        t = np.linspace(*curve.interval, 64)
        _check_on_surface(scene.u, curve.jet(t).pos)


def _check_on_surface(u, x):
    jet = ex.eval_jet(u, x)
    bad = np.abs(jet.v) > EPS_ON_SURFACE * (1.0 + np.linalg.norm(jet.d, axis=-1))
    if np.any(bad):
        i = np.flatnonzero(bad.ravel())[0]
        raise OffSurfaceError(x.reshape(-1, 3)[i], jet.v.ravel()[i])


def find_characteristic_points(scene: Scene, tol: float = 1e-10) -> list:
    """Parameter points where the horizontal gradient of ``u`` vanishes.

    Local minima of ``l`` on a coarse grid are polished by damped
    Gauss-Newton on ``(p, q)(chart(s)) = 0``.
    """
    grid = _scan_grid(scene.domain)
    x, _, _ = chart_eval(scene, grid)
    _, pq, _, _ = horizontal_gradient(scene.u, x)
    l = np.linalg.norm(pq, axis=-1)
    pad = np.pad(l, 1, constant_values=np.inf)
    n = SCAN_GRID
    is_min = np.ones_like(l, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_min &= l <= pad[1 + di:1 + di + n, 1 + dj:1 + dj + n]
    # a genuine zero sits well below the typical size of l on the grid
    is_min &= l < CANDIDATE_FRACTION * np.median(l)
    idx = np.argwhere(is_min)
    idx = idx[np.argsort(l[is_min])][:MAX_CANDIDATES]
    found = []
    h = max(np.ptp(grid[..., 0]), np.ptp(grid[..., 1])) / (n - 1)
    for i, j in idx:
        s = _polish(scene, grid[i, j].copy(), tol)
        if s is None or np.linalg.norm(s - grid[i, j]) > 4 * h:
            continue
        if not scene.domain.contains(s[None, :], margin=-1e-12)[0]:
            continue
        if all(np.linalg.norm(s - f) > 1e-6 for f in found):
            found.append(s)
    return found


def _polish(scene, s, tol, max_iter: int = 60):
    for _ in range(max_iter):
        x, T1, T2 = chart_eval(scene, s[None, :])
        _, pq, dpq, gnorm = horizontal_gradient(scene.u, x)
        F = pq[0]
        if np.linalg.norm(F) <= tol * (1.0 + gnorm[0]):
            return s
        J = np.stack([dpq[0] @ T1[0], dpq[0] @ T2[0]], axis=-1)
        step = np.linalg.lstsq(J, -F, rcond=None)[0]
        lam = 1.0
        while lam > 1e-4:
            trial = s + lam * step
            xt, _, _ = chart_eval(scene, trial[None, :])
            if np.linalg.norm(horizontal_gradient(scene.u, xt)[1][0]) < np.linalg.norm(F):
                break
            lam *= 0.5
        if lam <= 1e-4:
            return None
        s = s + lam * step
    return None


def _integrate_region(scene: Scene, g, centre, rho_e: float, *, abs_tol, rel_tol, max_cells):
    """Integral of ``g(s)`` over the domain minus a disk of radius ``rho_e`` at ``centre``."""
    dom = scene.domain
    if centre is None:
        if isinstance(dom, RectDomain):
            return integrate_2d(g, dom.bbox(), abs_tol=abs_tol, rel_tol=rel_tol, max_cells=max_cells)
        centre = np.asarray(dom.center, dtype=float)
    c = np.asarray(centre, dtype=float)

    def polar(pts):
        sigma, theta = pts[:, 0], pts[:, 1]
        rmax = dom.rho_max(c, theta)
        if np.any(rmax <= rho_e):
            raise IntegrationError("excision disk reaches the domain boundary")
        rho = rho_e + sigma * (rmax - rho_e)
        s = np.stack([c[0] + rho * np.cos(theta), c[1] + rho * np.sin(theta)], axis=-1)
        return g(s) * (rmax - rho_e) * rho

    evals = pieces = 0
    parts_v, parts_e = [], []
    for a, b in dom.sectors(c):
        r = integrate_2d(polar, (0.0, 1.0, a, b), abs_tol=abs_tol, rel_tol=rel_tol, max_cells=max_cells)
        parts_v.append(r.value)
        parts_e.append(r.error)
        evals += r.evaluations
        pieces += r.pieces
    return QuadResult(math.fsum(parts_v), math.fsum(parts_e), evals, pieces)


def _centre(scene: Scene, points: list):
    if len(points) > 1:
        raise IntegrationError(
            f"{len(points)} characteristic points in one chart; split the scene so each chart holds at most one"
        )
    return points[0] if points else None


def _boundary_integrals(scene: Scene, density, *, abs_tol, rel_tol):
    values, errors, evals = [], [], 0
    for curve in scene.boundary:
        onc = scene.on_surface(curve)
        r = integrate_1d(lambda t, onc=onc: density(onc, t), *curve.interval, abs_tol=abs_tol, rel_tol=rel_tol)
        values.append(r.value)
        errors.append(r.error)
        evals += r.evaluations
    return values, errors, evals


def _orientation_name(sgn: int) -> str:
    return "as-authored" if sgn > 0 else "flipped"


def _finite_parts(kind, L, scene, *, abs_tol, rel_tol, max_cells, points=None):
    kind = ConnectionKind.parse(kind)
    L = check_metric_param(L)
    table = coeff_table(kind, L)
    if points is None:
        points = find_characteristic_points(scene)
    centre = _centre(scene, points)

    def g(s):
        x, T1, T2 = chart_eval(scene, s)
        K = gauss_curvature_L(kind, L, scene.u, x, table=table).K_surf
        return K * finite_area_element(L, x, T1, T2)

    inner = _integrate_region(scene, g, centre, 0.0, abs_tol=abs_tol, rel_tol=rel_tol, max_cells=max_cells)
    bvals, berrs, bevals = _boundary_integrals(
        scene, lambda onc, t: finite_L_line_density(kind, L, onc, t, table=table), abs_tol=abs_tol, rel_tol=rel_tol
    )
    return inner, bvals, berrs, bevals, points


def orientation_autodetect(scene: Scene, *, abs_tol=DEFAULT_ABS_TOL, rel_tol=DEFAULT_REL_TOL,
                           max_cells=MAX_CELLS) -> int:
    """``+1`` when the boundary as authored satisfies classical Gauss-Bonnet at L=1, else ``-1``."""
    validate_scene(scene)
    inner, bvals, _, _, _ = _finite_parts(ConnectionKind.LEVI_CIVITA, 1.0, scene,
                                          abs_tol=abs_tol, rel_tol=rel_tol, max_cells=max_cells)
    target = 2 * math.pi * scene.euler_characteristic
    plus = abs(inner.value + math.fsum(bvals) - target)
    minus = abs(inner.value - math.fsum(bvals) - target)
    if min(plus, minus) > AMBIGUOUS_ORIENTATION:
        raise OrientationError(
            f"neither orientation satisfies classical Gauss-Bonnet (residuals {plus:.3g}, {minus:.3g})"
        )
    return 1 if plus <= minus else -1


def gb_check_finite_L(kind, L: float, scene: Scene, *, orientation: int = 1, abs_tol=DEFAULT_ABS_TOL,
                      rel_tol=DEFAULT_REL_TOL, max_cells=MAX_CELLS) -> GBReport:
    """Riemannian integrals at finite L; residual is measured against ``2 pi chi``."""
    kind = ConnectionKind.parse(kind)
    validate_scene(scene)
    inner, bvals, berrs, bevals, points = _finite_parts(kind, L, scene, abs_tol=abs_tol, rel_tol=rel_tol,
                                                        max_cells=max_cells)
    bvals = [orientation * v for v in bvals]
    target = 2 * math.pi * scene.euler_characteristic
    residual = math.fsum([inner.value, *bvals, -target])
    return GBReport(
        kind=kind.value, mode="finite-L", L=float(L), orientation=_orientation_name(orientation),
        interior=inner.value, interior_error=inner.error, boundary=bvals, boundary_errors=berrs,
        target=target, residual=residual, residual_error=inner.error + math.fsum(berrs),
        excised_area_fraction=0.0,
        node_counts={"interior": inner.evaluations, "boundary": bevals},
        characteristic_points=[list(map(float, p)) for p in points],
    )


def gb_residual_limit(kind, scene: Scene, rho_excise: float = DEFAULT_EXCISION, *, orientation: int | None = None,
                      abs_tol=DEFAULT_ABS_TOL, rel_tol=DEFAULT_REL_TOL, max_cells=MAX_CELLS) -> GBReport:
    """Limit interior and boundary integrals and their sum.

    With a characteristic point the interior is evaluated at excision radii
    ``rho, rho/2, rho/4`` and linearly extrapolated to zero.
    """
    kind = ConnectionKind.parse(kind)
    if kind is ConnectionKind.LEVI_CIVITA:
        raise UnsupportedKindError("limit Gauss-Bonnet is provided for svk1, svk2 and adapted")
    validate_scene(scene)
    if orientation is None:
        orientation = orientation_autodetect(scene, abs_tol=abs_tol, rel_tol=rel_tol, max_cells=max_cells)
    points = find_characteristic_points(scene)
    centre = _centre(scene, points)

    def g(s):
        x, T1, T2 = chart_eval(scene, s)
        d = HorizontalData(scene.u, x)
        K = gauss_curvature_limit(kind, scene.u, x, data=d)
        return K * np.abs(limit_area_density(scene.u, x, T1, T2, data=d))

    opts = dict(abs_tol=abs_tol, rel_tol=rel_tol, max_cells=max_cells)
    evals = 0
    table = []
    if centre is None:
        r = _integrate_region(scene, g, None, 0.0, **opts)
        interior, interior_err, evals, excised = r.value, r.error, r.evaluations, 0.0
    else:
        radii = [rho_excise, rho_excise / 2, rho_excise / 4]
        vals, errs = [], []
        for rho in radii:
            r = _integrate_region(scene, g, centre, rho, **opts)
            vals.append(r.value)
            errs.append(r.error)
            evals += r.evaluations
            table.append({"rho": rho, "interior": r.value, "error": r.error})
        d1, d2 = vals[1] - vals[0], vals[2] - vals[1]
        if abs(d1) > 10 * max(errs) and abs(d2) > DIVERGENCE_RATIO * abs(d1):
            raise NonIntegrableSingularityError(radii, vals)
        coarse = 2 * vals[1] - vals[0]
        interior = 2 * vals[2] - vals[1]
        interior_err = abs(interior - coarse) + 2 * errs[2] + errs[1]
        excised = math.pi * rho_excise**2 / scene.domain.area

    bvals, berrs, bevals = _boundary_integrals(
        scene, lambda onc, t: signed_limit_line_density(kind, onc, t, orientation=orientation),
        abs_tol=abs_tol, rel_tol=rel_tol,
    )
    residual = math.fsum([interior, *bvals])
    return GBReport(
        kind=kind.value, mode="limit", L=None, orientation=_orientation_name(orientation),
        interior=interior, interior_error=interior_err, boundary=bvals, boundary_errors=berrs,
        target=0.0, residual=residual, residual_error=interior_err + math.fsum(berrs),
        excised_area_fraction=excised, node_counts={"interior": evals, "boundary": bevals},
        characteristic_points=[list(map(float, p)) for p in points], extrapolation=table,
    )
