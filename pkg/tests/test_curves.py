from __future__ import annotations

import warnings

import numpy as np
import pytest

from heisgb.connections import ConnectionKind
from heisgb.curves import (
    Branch,
    MarginalClassificationWarning,
    ParamCurve,
    clamped_sqrt,
    curve_curvature_closed_form,
    curve_curvature_L,
    curve_curvature_limit,
    split_components,
)
from heisgb.errors import NonRegularCurveError, NumericContractError, UnsupportedKindError

circle = ParamCurve.from_strings("cos(t),sin(t),0")


def test_svk1_circle_both_paths_agree():
    # w = -1/2 on the unit circle in the plane x3 = 0
    assert circle.jet(0.0).omega == -0.5
    a = curve_curvature_L("svk1", 100.0, circle, 0.0)
    b = curve_curvature_closed_form("svk1", 100.0, circle, 0.0)
    assert abs(a - b) <= 1e-12


@pytest.mark.parametrize("L", [0.5, 1.0, 1e2, 1e6])
def test_svk1_circle_is_one_at_every_L(L):
    assert curve_curvature_L("svk1", L, circle, 0.3) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("kind", ["svk1", "svk2", "adapted"])
def test_finite_L_approaches_limit(kind):
    c = ParamCurve.from_strings("cos(t), sin(t), 0.3*sin(t) + t^2")
    lim = curve_curvature_limit(kind, c, 0.8).value
    gaps = [abs(float(curve_curvature_L(kind, L, c, 0.8)) - lim) for L in (1e2, 1e4, 1e6)]
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 1e-4


@pytest.mark.parametrize("kind", ["adapted", "svk2"])
@pytest.mark.parametrize("L", [0.1, 1.0, 1e4])
def test_straight_horizontal_line_is_straight(kind, L):
    line = ParamCurve.from_strings("t,0,0")
    assert curve_curvature_L(kind, L, line, 0.7) == 0.0


@pytest.mark.parametrize("kind", ["svk1", "svk2", "adapted"])
def test_closed_form_matches_definition(kind):
    c = ParamCurve.from_strings("t + sin(t), t^2/3, cos(2*t)")
    t = np.linspace(-1, 1, 7)
    for L in (0.3, 2.0, 50.0):
        a = curve_curvature_L(kind, L, c, t)
        b = curve_curvature_closed_form(kind, L, c, t)
        np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize(
    "kind,source,t,branch,value",
    [
        ("svk1", "cos(t),sin(t),0", 1.1, Branch.NON_HORIZONTAL, 1.0),
        ("svk1", "t,t^2/2,0", 0.0, Branch.HORIZONTAL_FINITE, 1.0),
        ("svk1", "t,0,t^2/2", 0.0, Branch.HORIZONTAL_DIVERGENT, 1.0),
        ("adapted", "cos(t),sin(t),0", 0.4, Branch.NON_HORIZONTAL, 0.0),
        ("svk2", "t,0,t^2/2", 0.0, Branch.HORIZONTAL_DIVERGENT, 1.0),
    ],
)
def test_limit_branches(kind, source, t, branch, value):
    r = curve_curvature_limit(kind, ParamCurve.from_strings(source), t)
    assert r.branch is branch
    assert r.value == pytest.approx(value, abs=1e-15)
    assert r.value >= 0


def test_divergent_coefficient_matches_finite_L_sweep():
    c = ParamCurve.from_strings("t,0,t^2/2")
    ratios = [float(curve_curvature_L("svk1", L, c, 0.0)) / np.sqrt(L) for L in (1e4, 1e6, 1e8)]
    assert abs(ratios[-1] - 1.0) < 1e-3


def test_levi_civita_limit_not_provided():
    with pytest.raises(UnsupportedKindError):
        curve_curvature_limit("levi-civita", circle, 0.0)


def test_non_regular_point():
    c = ParamCurve.from_strings("t^2,t^3,0")
    with pytest.raises(NonRegularCurveError):
        curve_curvature_L("svk1", 1.0, c, 0.0)
    with pytest.raises(NonRegularCurveError):
        curve_curvature_limit("svk1", c, 0.0)


def test_marginal_classification_warns():
    c = ParamCurve.from_strings("t,0,1e-8*t")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        r = curve_curvature_limit("svk1", c, 0.0)
    assert r.marginal
    assert any(issubclass(w.category, MarginalClassificationWarning) for w in caught)


def test_clamp_tolerates_roundoff_only():
    assert clamped_sqrt(np.array(-1e-14), np.array(1.0)) == 0.0
    with pytest.raises(NumericContractError):
        clamped_sqrt(np.array(-1e-3), np.array(1.0))


def test_reversed_curve_has_same_curvature():
    c = ParamCurve.from_strings("cos(t), sin(2*t), t/3", (0.0, 2.0))
    r = c.reversed()
    for kind in ConnectionKind:
        np.testing.assert_allclose(curve_curvature_L(kind, 2.0, c, 0.5), curve_curvature_L(kind, 2.0, r, 1.5),
                                   rtol=1e-12)


def test_split_components_respects_parentheses():
    assert split_components("atan(t), sin(t)*cos(t), (t+1)") == ["atan(t)", "sin(t)*cos(t)", "(t+1)"]
