from __future__ import annotations

import numpy as np
import pytest

from heisgb.connections import ConnectionKind
from heisgb.errors import CharacteristicPointError, OffSurfaceError, UnsupportedKindError
from heisgb.surfaces import (
    gauss_curvature_L,
    gauss_curvature_limit,
    mean_curvature_L,
    mean_curvature_limit,
    second_fundamental_form,
    second_fundamental_form_closed_form,
    surface_frame,
)

PARABOLOID = "x3 - (x1^2+x2^2)/2"
# reference values from a symbolic computation of the horizontal formulas
PARABOLOID_H_AT_1_0 = -2 / np.sqrt(5)
PARABOLOID_K_SVK1 = -10 / 17  # at (1/2, 3/10, 17/100)


@pytest.mark.parametrize("L", [0.25, 1.0, 16.0])
def test_plane_frame_symbols(L):
    f = surface_frame("x3", (1.0, 0.0, 0.0), L)
    assert (f.p, f.q, f.l) == (0.0, 0.5, 0.5)
    assert f.r == pytest.approx(L**-0.5, rel=1e-15)
    assert (f.pbar, f.qbar) == (0.0, 1.0)
    np.testing.assert_array_equal(f.e1, [1.0, 0.0, 0.0])
    assert f.e2[2] == pytest.approx(-(f.l / f.l_L) / np.sqrt(L), rel=1e-15)


def test_vertical_translate_has_same_frame():
    a = surface_frame("x3", (1.0, 0.0, 0.0), 2.0)
    b = surface_frame("x3 - 1", (1.0, 0.0, 1.0), 2.0)
    for name in ("v_L", "e1", "e2"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))


def test_characteristic_point_error_carries_point():
    with pytest.raises(CharacteristicPointError) as info:
        surface_frame("x3", (0.0, 0.0, 0.0), 1.0)
    assert info.value.point == (0.0, 0.0, 0.0)
    assert info.value.l == 0.0


def test_off_surface_error():
    with pytest.raises(OffSurfaceError):
        surface_frame("x3", (1.0, 0.0, 0.1), 1.0)


def test_frame_is_orthonormal_on_batch():
    pts = np.array([[0.3, -0.2, 0.065], [1.0, 1.0, 1.0], [-0.7, 0.4, 0.325]])
    f = surface_frame(PARABOLOID, pts, 3.0)
    np.testing.assert_allclose(f.gram(), np.broadcast_to(np.eye(3), (3, 3, 3)), atol=1e-12)
    assert not np.any(f.e1[:, 2])


@pytest.mark.parametrize("kind", ["svk1", "svk2", "adapted"])
@pytest.mark.parametrize("L", [0.5, 3.0, 40.0])
def test_closed_form_second_fundamental_form(kind, L):
    pts = np.array([[0.3, -0.2, 0.065], [-0.7, 0.4, 0.325]])
    a = second_fundamental_form(kind, L, PARABOLOID, pts)
    b = second_fundamental_form_closed_form(kind, L, PARABOLOID, pts)
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-9)


def test_plane_is_minimal_in_the_limit():
    for p in [(1.0, 0.0, 0.0), (0.3, -2.0, 0.0)]:
        for kind in ("svk1", "svk2", "adapted"):
            assert abs(mean_curvature_limit(kind, "x3", p)) < 1e-15


def test_paraboloid_mean_curvature_limit():
    p = (1.0, 0.0, 0.5)
    assert mean_curvature_limit("svk1", PARABOLOID, p) == pytest.approx(PARABOLOID_H_AT_1_0, rel=1e-14)
    assert abs(mean_curvature_L("svk1", 1e8, PARABOLOID, p) - PARABOLOID_H_AT_1_0) < 1e-3


def test_paraboloid_gauss_curvature_limit():
    p = (0.5, 0.3, 0.17)
    assert gauss_curvature_limit("svk1", PARABOLOID, p) == pytest.approx(PARABOLOID_K_SVK1, rel=1e-14)


@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
def test_plane_svk1_limit_is_minus_inverse_square(rho):
    p = (rho * np.cos(0.7), rho * np.sin(0.7), 0.0)
    assert gauss_curvature_limit("svk1", "x3", p) == pytest.approx(-1 / rho**2, rel=1e-13)


def test_plane_svk1_finite_L_tends_to_limit():
    r = gauss_curvature_L("svk1", 1e8, "x3", (1.0, 0.0, 0.0))
    assert abs(r.K_surf + 1.0) < 1e-3


def test_plane_svk2_limit():
    assert gauss_curvature_limit("svk2", "x3", (1.0, 0.0, 0.0)) == pytest.approx(-1.0, rel=1e-14)


def test_adapted_limit_vanishes():
    pts = np.array([[0.3, -0.2, 0.065], [-0.7, 0.4, 0.325]])
    assert not np.any(gauss_curvature_limit("adapted", PARABOLOID, pts))


def test_levi_civita_limit_not_provided():
    with pytest.raises(UnsupportedKindError):
        gauss_curvature_limit("levi-civita", "x3", (1.0, 0.0, 0.0))


@pytest.mark.parametrize("kind", list(ConnectionKind))
def test_gauss_equation_is_exact(kind):
    r = gauss_curvature_L(kind, 2.5, PARABOLOID, (0.3, -0.2, 0.065))
    det = r.II[0, 0] * r.II[1, 1] - r.II[0, 1] * r.II[1, 0]
    assert r.K_surf == r.K_amb + det


def test_svk1_ambient_term():
    f = surface_frame(PARABOLOID, (0.3, -0.2, 0.065), 7.0)
    r = gauss_curvature_L("svk1", 7.0, frame=f)
    assert r.K_amb == pytest.approx(-7.0 / 2 * f.rbar_L**2, rel=1e-13)


def test_blow_up_toward_characteristic_point():
    rho = np.geomspace(1e-1, 1e-4, 7)
    pts = np.stack([rho * np.cos(0.3), rho * np.sin(0.3), 0 * rho], axis=-1)
    K = gauss_curvature_limit("svk1", "x3", pts)
    slope = np.polyfit(np.log(rho), np.log(np.abs(K)), 1)[0]
    assert abs(slope + 2) <= 0.05

