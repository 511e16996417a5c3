"""Reading scene files (TOML).

Layout::

    name = "plane-disk"

    [surface]
    u = "x3"                                  # field expression in x1, x2, x3
    chart = ["s1", "s2", "0"]                 # three expressions in s1, s2
    domain = { disk = { radius = 1.0, center = [0.0, 0.0] } }
    # or     { rectangle = [s1a, s1b, s2a, s2b] }

    [boundary.1]                              # one table per boundary curve
    components = ["cos(t)", "sin(t)", "0"]
    interval = [0.0, "2*pi"]                  # numbers or constant expressions

    [options]                                 # all optional
    euler_characteristic = 1
    orientation = "auto"                      # auto | as-authored | flip
    L_grid = [0.25, 1.0, 4.0]
    abs_tol = 1e-8
    rel_tol = 1e-8
    rho_excise = 1e-2
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import expr as ex
from .curves import ParamCurve, split_components
from .errors import InputError
from .gauss_bonnet import DEFAULT_EXCISION, DiskDomain, RectDomain, Scene
from .quadrature import DEFAULT_ABS_TOL, DEFAULT_REL_TOL

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ORIENTATIONS = {"auto": None, "as-authored": 1, "flip": -1, "flipped": -1}
SHIPPED = ("plane-disk", "paraboloid-cap", "vertical-cylinder")


class SceneFileError(InputError):
    pass


@dataclass(frozen=True)
class SceneOptions:
    orientation: int | None = None
    L_grid: tuple = (0.25, 1.0, 4.0)
    abs_tol: float = DEFAULT_ABS_TOL
    rel_tol: float = DEFAULT_REL_TOL
    rho_excise: float = DEFAULT_EXCISION


@dataclass(frozen=True)
class SceneFile:
    scene: Scene
    options: SceneOptions = field(default_factory=SceneOptions)
    source: str = "<string>"


def _number(value, where: str) -> float:
    if isinstance(value, bool):
        raise SceneFileError(f"{where}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(ex.evaluate(ex.parse(value, ()), {}))
        except ex.ExprError as err:
            raise SceneFileError(f"{where}: {err}") from err
    raise SceneFileError(f"{where}: expected a number or constant expression, got {value!r}")


def _exprs(value, variables, where: str) -> tuple:
    if isinstance(value, str):
        value = split_components(value)
    if not isinstance(value, list) or len(value) != 3 or not all(isinstance(v, str) for v in value):
        raise SceneFileError(f"{where}: expected three expression strings")
    try:
        return tuple(ex.parse(v, variables) for v in value)
    except ex.ExprError as err:
        raise SceneFileError(f"{where}: {err}") from err


def _domain(raw):
    if not isinstance(raw, dict) or len(raw) != 1:
        raise SceneFileError("surface.domain: expected exactly one of 'disk' or 'rectangle'")
    (kind, body), = raw.items()
    try:
        if kind == "disk":
            if not isinstance(body, dict) or "radius" not in body:
                raise SceneFileError("surface.domain.disk: needs a radius")
            centre = body.get("center", [0.0, 0.0])
            if not isinstance(centre, list) or len(centre) != 2:
                raise SceneFileError("surface.domain.disk.center: expected two numbers")
            return DiskDomain(_number(body["radius"], "disk.radius"),
                              tuple(_number(c, "disk.center") for c in centre))
        if kind == "rectangle":
            if not isinstance(body, list) or len(body) != 4:
                raise SceneFileError("surface.domain.rectangle: expected [s1a, s1b, s2a, s2b]")
            return RectDomain(*(_number(b, "rectangle") for b in body))
    except ValueError as err:
        if isinstance(err, SceneFileError):
            raise
        raise SceneFileError(f"surface.domain: {err}") from err
    raise SceneFileError(f"surface.domain: unknown domain kind {kind!r}")


def _in_range(value: float, lo: float, hi: float, where: str) -> float:
    if not lo < value < hi:
        raise SceneFileError(f"options.{where}={value} outside ({lo}, {hi})")
    return value


def _options(raw: dict) -> tuple[SceneOptions, int]:
    known = {"euler_characteristic", "orientation", "L_grid", "abs_tol", "rel_tol", "rho_excise"}
    unknown = set(raw) - known
    if unknown:
        raise SceneFileError(f"options: unknown keys {sorted(unknown)}")
    chi = raw.get("euler_characteristic", 1)
    if isinstance(chi, bool) or not isinstance(chi, int):
        raise SceneFileError("options.euler_characteristic: expected an integer")
    orient = raw.get("orientation", "auto")
    if orient not in ORIENTATIONS:
        raise SceneFileError(f"options.orientation: expected one of {sorted(ORIENTATIONS)}")
    grid = raw.get("L_grid", [0.25, 1.0, 4.0])
    if not isinstance(grid, list) or not grid:
        raise SceneFileError("options.L_grid: expected a non-empty list")
    grid = tuple(_in_range(_number(L, "options.L_grid"), 0.0, float("inf"), "L_grid") for L in grid)
    opts = SceneOptions(
        orientation=ORIENTATIONS[orient],
        L_grid=grid,
        abs_tol=_in_range(_number(raw.get("abs_tol", DEFAULT_ABS_TOL), "abs_tol"), 0.0, 1.0, "abs_tol"),
        rel_tol=_in_range(_number(raw.get("rel_tol", DEFAULT_REL_TOL), "rel_tol"), 0.0, 1.0, "rel_tol"),
        rho_excise=_in_range(_number(raw.get("rho_excise", DEFAULT_EXCISION), "rho_excise"), 0.0, 0.5, "rho_excise"),
    )
    return opts, chi


def parse_scene(data: dict, source: str = "<string>") -> SceneFile:
    """Build a scene from an already-decoded TOML document."""
    surface = data.get("surface")
    if not isinstance(surface, dict):
        raise SceneFileError("missing [surface] section")
    for key in ("u", "chart", "domain"):
        if key not in surface:
            raise SceneFileError(f"surface.{key} is required")
    try:
        u = ex.parse(surface["u"], ex.FIELD_VARS)
    except ex.ExprError as err:
        raise SceneFileError(f"surface.u: {err}") from err
    chart = _exprs(surface["chart"], ex.CHART_VARS, "surface.chart")
    domain = _domain(surface["domain"])

    boundary = data.get("boundary", {})
    if not isinstance(boundary, dict) or not boundary:
        raise SceneFileError("at least one [boundary.N] section is required")
    curves = []
    for key in sorted(boundary, key=lambda k: (len(k), k)):
        section = boundary[key]
        where = f"boundary.{key}"
        if not isinstance(section, dict) or "components" not in section:
            raise SceneFileError(f"{where}.components is required")
        comps = _exprs(section["components"], ex.CURVE_VARS, f"{where}.components")
        interval = section.get("interval", [0.0, "2*pi"])
        if not isinstance(interval, list) or len(interval) != 2:
            raise SceneFileError(f"{where}.interval: expected [a, b]")
        a, b = (_number(v, f"{where}.interval") for v in interval)
        if not a < b:
            raise SceneFileError(f"{where}.interval: need a < b")
        curves.append(ParamCurve(comps, (a, b)))

    options, chi = _options(data.get("options", {}))
    name = data.get("name", Path(source).stem)
    scene = Scene(u, chart, domain, tuple(curves), chi, str(name))
    return SceneFile(scene, options, source)


def loads_scene(text: str, source: str = "<string>") -> SceneFile:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        raise SceneFileError(f"{source}: {err}") from err
    return parse_scene(data, source)


def load_scene(path) -> SceneFile:
    """Load a scene from a path, or a shipped scene by name."""
    if str(path) in SHIPPED and not Path(path).exists():
        return shipped_scene(str(path))
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise SceneFileError(f"cannot read scene file {path}: {err.strerror}") from err
    return loads_scene(text, str(path))


def shipped_scene(name: str) -> SceneFile:
    if name not in SHIPPED:
        raise SceneFileError(f"no shipped scene named {name!r}; choose from {', '.join(SHIPPED)}")
    text = resources.files("heisgb.scenes").joinpath(f"{name}.toml").read_text(encoding="utf-8")
    return loads_scene(text, f"{name}.toml")
