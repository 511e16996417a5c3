from __future__ import annotations

import math

import pytest

from heisgb.gauss_bonnet import DiskDomain, RectDomain
from heisgb.scenefile import SHIPPED, SceneFileError, load_scene, loads_scene, shipped_scene

MINIMAL = """
[surface]
u = "x3"
chart = ["s1", "s2", "0"]
domain = { disk = { radius = 1.0 } }

[boundary.1]
components = "cos(t), sin(t), 0"
"""


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_scenes_load(name):
    sf = shipped_scene(name)
    assert sf.scene.name == name
    assert sf.scene.boundary


def test_defaults_and_constant_expressions():
    sf = loads_scene(MINIMAL)
    assert isinstance(sf.scene.domain, DiskDomain)
    assert sf.scene.boundary[0].interval == (0.0, 2 * math.pi)
    assert sf.scene.euler_characteristic == 1
    assert sf.options.orientation is None
    assert sf.options.L_grid == (0.25, 1.0, 4.0)


def test_rectangle_and_options():
    text = MINIMAL.replace("{ disk = { radius = 1.0 } }", '{ rectangle = [0, "pi", -1, 1] }') + """
[options]
orientation = "flip"
euler_characteristic = 0
L_grid = [2, "1/2"]
"""
    sf = loads_scene(text)
    assert sf.scene.domain == RectDomain(0.0, math.pi, -1.0, 1.0)
    assert sf.options.orientation == -1
    assert sf.options.L_grid == (2.0, 0.5)
    assert sf.scene.euler_characteristic == 0


def test_boundaries_are_ordered_numerically():
    text = MINIMAL + """
[boundary.10]
components = ["t", "0", "0"]
[boundary.2]
components = ["0", "t", "0"]
"""
    sf = loads_scene(text)
    assert [c.source()[0] for c in sf.scene.boundary] == ["cos(t)", "0.0", "t"]


@pytest.mark.parametrize(
    "edit,message",
    [
        (lambda t: t.replace('u = "x3"', 'u = "x3 +"'), "surface.u"),
        (lambda t: t.replace('u = "x3"', 'u = "y"'), "surface.u"),
        (lambda t: t.replace('chart = ["s1", "s2", "0"]', 'chart = ["s1", "s2"]'), "surface.chart"),
        (lambda t: t.replace("radius = 1.0", "radius = -1.0"), "domain"),
        (lambda t: t.replace("disk = { radius = 1.0 }", "ball = 1"), "domain"),
        (lambda t: t.split("[boundary.1]")[0], "boundary"),
        (lambda t: t + "[options]\nrho_excise = 0.9\n", "rho_excise"),
        (lambda t: t + "[options]\nfoo = 1\n", "unknown"),
        (lambda t: t + "[options]\norientation = 'sideways'\n", "orientation"),
        (lambda t: t + "[options]\nL_grid = [0]\n", "L_grid"),
        (lambda t: t + 'interval = [1, 0]\n', "interval"),
        (lambda t: t + "= broken", "string"),
    ],
)
def test_invalid_scenes(edit, message):
    with pytest.raises(SceneFileError, match=message):
        loads_scene(edit(MINIMAL))


def test_missing_file():
    with pytest.raises(SceneFileError, match="cannot read"):
        load_scene("/nonexistent/scene.toml")


def test_unknown_shipped_name():
    with pytest.raises(SceneFileError):
        shipped_scene("torus")


def test_load_by_path(tmp_path):
    path = tmp_path / "my-scene.toml"
    path.write_text(MINIMAL)
    sf = load_scene(path)
    assert sf.scene.name == "my-scene" and sf.source == str(path)
