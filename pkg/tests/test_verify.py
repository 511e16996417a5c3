from __future__ import annotations

import numpy as np
import pytest

from heisgb import expr as ex
from heisgb.connections import ConnectionKind, coeff_table
from heisgb.verify import (
    deviation,
    property_jobs,
    random_surface_curve,
    random_surface_point,
    run_properties,
)


def corrupted_svk1(L):
    table = coeff_table(ConnectionKind.SVK1, L).copy()
    table[0, 1, 1] += 0.1  # nabla_{X1} X2 gains an X2 part, breaking <X2, X2> = 1
    return table


def test_property_names_are_unique_and_cover_kinds():
    names = [name for name, _, _ in property_jobs()]
    assert len(names) == len(set(names))
    for kind in ConnectionKind:
        assert f"metric-compatibility[{kind.value}]" in names
        assert f"curvature-antisymmetry[{kind.value}]" in names
    for kind in ("svk1", "svk2", "adapted"):
        for prop in ("curve-closed-form", "second-fundamental-form", "projected-acceleration",
                     "curve-limit", "surface-limit", "geodesic-limit"):
            assert f"{prop}[{kind}]" in names
    assert "jet-vs-finite-difference" in names


def test_small_run_passes():
    results = run_properties(seed=1, samples=8)
    assert all(r.passed for r in results), [r for r in results if not r.passed]
    assert all(r.samples >= 8 for r in results)


def test_runs_are_deterministic():
    a = run_properties(seed=5, samples=6, only=("curve-closed-form", "geodesic-limit"))
    b = run_properties(seed=5, samples=6, only=("geodesic-limit", "curve-closed-form"))
    assert [(r.name, r.worst) for r in a] == [(r.name, r.worst) for r in b]


def test_selection_does_not_change_streams():
    full = {r.name: r.worst for r in run_properties(seed=3, samples=4)}
    one = run_properties(seed=3, samples=4, only=("surface-limit[svk2]",))
    assert one[0].worst == full["surface-limit[svk2]"]


def test_corrupted_table_fails_metric_compatibility_by_name():
    results = run_properties(seed=42, samples=10, tables={ConnectionKind.SVK1: corrupted_svk1},
                             only=("metric-compatibility",))
    failed = [r for r in results if not r.passed]
    assert [r.name for r in failed] == ["metric-compatibility[svk1]"]
    assert failed[0].worst > 1e-3 and failed[0].detail


def test_deviation_is_relative_for_large_values():
    assert deviation(1e6, 1e6 * (1 + 1e-12)) < 2e-12
    assert deviation(0.0, 1e-12) == pytest.approx(1e-12)
    assert deviation([1.0, 2.0], [1.0, 2.5]) == pytest.approx(0.5 / 3.5)


def test_samplers_respect_their_guards():
    rng = np.random.default_rng(11)
    for _ in range(5):
        s, pts = random_surface_point(rng, 4)
        u = ex.parse(s.u, ex.FIELD_VARS)
        assert np.all(np.abs(ex.eval_jet(u, pts).v) < 1e-9)
        onc, t = random_surface_curve(rng, 3, min_omega=0.1)
        assert np.all(np.abs(onc.curve.jet(t).omega) >= 0.1)
