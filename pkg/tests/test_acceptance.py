"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import time

import numpy as np
import pytest

from heisgb.connections import ConnectionKind, curvature_tensor, sectional
from heisgb.errors import CharacteristicPointError
from heisgb.gauss_bonnet import chart_eval, gb_check_finite_L, gb_residual_limit
from heisgb.limits import limit_scan, log_grid
from heisgb.scenefile import SHIPPED, shipped_scene
from heisgb.surface_curves import geodesic_curvature_limit_arrays
from heisgb.surfaces import HorizontalData, gauss_curvature_limit, surface_frame
from heisgb.verify import random_surface_point, run_properties

SEED = 42


@pytest.fixture
def announce(capsys):
    """Print one PASS/FAIL line per criterion, bypassing output capture."""
    def emit(number: int, title: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}  {title}: {detail}", flush=True)
    return emit


def timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - start


def plane_disk_limit(announce, number, kind, interior, boundary):
    scene = shipped_scene("plane-disk").scene
    r, elapsed = timed(lambda: gb_residual_limit(kind, scene))
    b = math.fsum(r.boundary)
    checks = {
        "interior": abs(r.interior - interior) <= 1e-4,
        "boundary": abs(b - boundary) <= 1e-6,
        "residual": abs(r.residual) <= 1e-6,
        "runtime": elapsed <= 10.0,
    }
    ok = all(checks.values())
    announce(number, f"plane-disk Gauss-Bonnet, {kind}", ok,
             f"interior={r.interior:.12g} (oracle {interior:.12g}), boundary={b:.12g} (oracle {boundary:.12g}), "
             f"residual={r.residual:.3g}, {elapsed:.2f}s")
    assert ok, checks


def test_criterion_1_plane_disk_svk1(announce):
    # oracle: K = -1/rho^2, area density rho/2, k = 1/R, length density R^2/2 on the unit disk
    plane_disk_limit(announce, 1, "svk1", -math.pi, math.pi)


def test_criterion_2_plane_disk_svk2(announce):
    # oracle: K = -cos^2(theta)/rho^2, k = sin^2(t)/R
    plane_disk_limit(announce, 2, "svk2", -math.pi / 2, math.pi / 2)


def test_criterion_3_adapted_connection_is_flat_in_the_limit(announce):
    worst_K = worst_k = 0.0
    residual_ok = True
    details = []
    for name in SHIPPED:
        scene = shipped_scene(name).scene
        a, b, c, d = scene.domain.bbox()
        s = np.stack(np.meshgrid(np.linspace(a, b, 41), np.linspace(c, d, 41), indexing="ij"), axis=-1)
        s = s[scene.domain.contains(s)]
        x, _, _ = chart_eval(scene, s)
        keep = _non_characteristic(scene.u, x)
        worst_K = max(worst_K, float(np.max(np.abs(gauss_curvature_limit("adapted", scene.u, x[keep])))))
        for curve in scene.boundary:
            t = np.linspace(*curve.interval, 257)
            lim = geodesic_curvature_limit_arrays("adapted", scene.on_surface(curve), t)
            worst_k = max(worst_k, float(np.max(np.abs(lim.signed))))
        r = gb_residual_limit("adapted", scene)
        nodes = r.node_counts["interior"] + r.node_counts["boundary"]
        residual_ok &= abs(r.residual) <= 1e-14 * nodes
        details.append(f"{name} residual={r.residual:.3g} (bound {1e-14 * nodes:.3g})")
    ok = worst_K == 0.0 and worst_k == 0.0 and residual_ok
    announce(3, "adapted connection", ok, f"max|K|={worst_K:.3g}, max|k|={worst_k:.3g}; " + "; ".join(details))
    assert ok


def _non_characteristic(u, x):
    keep = []
    for xi in x:
        try:
            HorizontalData(u, xi)
            keep.append(True)
        except CharacteristicPointError:
            keep.append(False)
    return np.array(keep)


@pytest.mark.parametrize("name", ["plane-disk", "paraboloid-cap"])
def test_criterion_4_classical_gauss_bonnet(name, announce):
    scene = shipped_scene(name).scene
    reports, elapsed = timed(lambda: [gb_check_finite_L("levi-civita", L, scene) for L in (0.25, 1.0, 4.0)])
    worst = max(abs(r.residual) for r in reports)
    ok = worst <= 1e-6 and elapsed <= 30.0 and all(r.target == 2 * math.pi for r in reports)
    res = ", ".join(f"L={r.L:g}: {r.residual:.3g}" for r in reports)
    announce(4, f"classical Gauss-Bonnet on {name}", ok, f"{res}; {elapsed:.2f}s")
    assert ok


def _suite(prefixes, samples):
    results = run_properties(SEED, samples, only=prefixes)
    bad = [r for r in results if not r.passed]
    worst = max(results, key=lambda r: r.worst / r.tolerance if r.tolerance else r.worst)
    detail = f"{len(results)} properties x {samples} samples, worst {worst.name} = {worst.worst:.3g}"
    if bad:
        detail += "; failed: " + ", ".join(r.name for r in bad)
    return not bad, detail


def test_criterion_5_two_path_equivalence(announce):
    ok, detail = _suite(("curve-closed-form", "second-fundamental-form", "projected-acceleration"), 100)
    announce(5, "two-path equivalence", ok, detail)
    assert ok


def test_criterion_6_limit_consistency(announce):
    ok, detail = _suite(("curve-limit", "surface-limit", "geodesic-limit"), 100)
    grid = log_grid(1e4, 1e8, 9)
    rng = np.random.default_rng(SEED)
    inputs = [("x3 - (x1^2 + x2^2)/2", (0.5, 0.3, 0.17))]
    for _ in range(5):
        s, p = random_surface_point(rng)
        inputs.append((s.u, p))
    exps = [limit_scan("gauss-curvature", "svk1", grid, u=u, point=p).exponent for u, p in inputs]
    fit_ok = all(e is not None and 0.4 <= e <= 1.1 for e in exps)
    ok = ok and fit_ok
    announce(6, "limit consistency at L=1e8", ok,
             f"{detail}; K remainder exponents {', '.join(f'{e:.3f}' for e in exps)}")
    assert ok


def test_criterion_7_metric_connections(announce):
    ok, detail = _suite(("metric-compatibility", "curvature-antisymmetry"), 50)
    exact = True
    for L in (0.25, 1.0, 3.0, 1e6):
        R = curvature_tensor("svk1", L)
        exact &= R[0, 1, 0, 1] == L / 2 and R[0, 1, 1, 0] == -L / 2
        exact &= np.count_nonzero(R) == 4
        exact &= not np.any(curvature_tensor("svk2", L)) and not np.any(curvature_tensor("adapted", L))
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(20):
        s, p = random_surface_point(rng, 4)
        L = float(10 ** rng.uniform(-2, 2))
        f = surface_frame(s.u, p, L)
        a = sectional(ConnectionKind.SVK1, L, f.e1, f.e2)
        b = -L / 2 * f.rbar_L**2
        worst = max(worst, float(np.max(np.abs(a - b) / (1 + np.abs(b)))))
    exact &= worst <= 1e-14
    ok = ok and bool(exact)
    announce(7, "metric connections", ok, f"{detail}; curvature entries exact={bool(exact)}, "
             f"ambient sectional term worst {worst:.3g}")
    assert ok


def test_criterion_8_jets_against_finite_differences(announce):
    ok, detail = _suite(("jet-vs-finite-difference",), 200)
    announce(8, "jet correctness", ok, detail + " (deviation in units of the tolerance)")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
