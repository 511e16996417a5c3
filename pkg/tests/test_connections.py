from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heisgb.connections import (
    ConnectionKind,
    coeff_table,
    curvature_from_table,
    curvature_tensor,
    metric_defect,
    sectional,
    torsion_from_table,
)
from heisgb.heisenberg import BRACKETS

Ls = st.floats(1e-3, 1e3)


def koszul_levi_civita(L):
    """Levi-Civita table from the Koszul formula for a constant frame metric."""
    G = np.diag([1.0, 1.0, L])
    br = BRACKETS @ G  # br[i, j, k] = <[X_i, X_j], X_k>
    lowered = 0.5 * (br - np.transpose(br, (2, 0, 1)) + np.transpose(br, (1, 2, 0)))
    return lowered @ np.linalg.inv(G)


def projected(L, P):
    """``P nabla^L P + (1 - P) nabla^L (1 - P)`` for a frame projection ``P``."""
    lc = koszul_levi_civita(L)
    Q = np.eye(3) - P
    return np.einsum("jm,imn,nk->ijk", P, lc, P) + np.einsum("jm,imn,nk->ijk", Q, lc, Q)


def oracle(kind, L):
    if kind is ConnectionKind.LEVI_CIVITA:
        return koszul_levi_civita(L)
    if kind is ConnectionKind.SVK1:
        return projected(L, np.diag([1.0, 1.0, 0.0]))
    if kind is ConnectionKind.SVK2:
        return projected(L, np.diag([0.0, 1.0, 1.0]))
    return np.zeros((3, 3, 3))


@settings(max_examples=50)
@given(st.sampled_from(list(ConnectionKind)), Ls)
def test_tables_match_independent_construction(kind, L):
    np.testing.assert_allclose(coeff_table(kind, L), oracle(kind, L), rtol=1e-14, atol=1e-14 * L)


def test_levi_civita_entries():
    T = coeff_table("levi-civita", 2.0)
    np.testing.assert_array_equal(T[0, 1], [0, 0, 0.5])
    np.testing.assert_array_equal(T[0, 2], [0, -1.0, 0])
    np.testing.assert_array_equal(T[2, 1], [1.0, 0, 0])


@settings(max_examples=50)
@given(st.sampled_from(list(ConnectionKind)), Ls)
def test_all_connections_are_metric(kind, L):
    assert metric_defect(coeff_table(kind, L), L) <= 1e-12 * (1 + L)


def test_levi_civita_is_torsion_free_and_others_are_not():
    assert np.max(np.abs(torsion_from_table(coeff_table("levi-civita", 3.0)))) == 0.0
    for kind in ("svk1", "svk2", "adapted"):
        assert np.max(np.abs(torsion_from_table(coeff_table(kind, 3.0)))) > 0.1


@settings(max_examples=50)
@given(st.sampled_from(list(ConnectionKind)), Ls)
def test_curvature_is_antisymmetric_exactly(kind, L):
    R = curvature_tensor(kind, L)
    assert np.array_equal(R, -np.transpose(R, (1, 0, 2, 3)))


@pytest.mark.parametrize("L", [0.25, 1.0, 3.0, 1e6])
def test_svk1_curvature_entries(L):
    R = curvature_tensor("svk1", L)
    np.testing.assert_array_equal(R[0, 1, 0], [0, L / 2, 0])
    np.testing.assert_array_equal(R[0, 1, 1], [-L / 2, 0, 0])
    mask = np.ones((3, 3, 3), bool)
    mask[0, 1, 0] = mask[0, 1, 1] = mask[1, 0, 0] = mask[1, 0, 1] = False
    assert not np.any(R[mask])


@pytest.mark.parametrize("kind", ["svk2", "adapted"])
def test_flat_connections(kind):
    assert not np.any(curvature_tensor(kind, 5.0))


def test_svk1_sectional_term_on_tangent_plane():
    # for orthonormal e1 = (qb, -pb, 0), e2 = (r pb, r qb, -(l/l_L)/sqrt L)
    L, pb, qb, r = 4.0, 0.6, 0.8, 0.3
    e1 = np.array([qb, -pb, 0.0])
    e2 = np.array([r * pb, r * qb, -np.sqrt(1 - r * r) / np.sqrt(L)])
    assert sectional("svk1", L, e1, e2) == pytest.approx(-L / 2 * r * r, rel=1e-15)


def test_single_entry_lookup_and_bad_index():
    assert curvature_tensor("svk1", 2.0, 1, 2, 1)[1] == 1.0
    with pytest.raises(ValueError):
        curvature_tensor("svk1", 2.0, 0, 1, 1)


def test_curvature_from_table_generic_path():
    rng = np.random.default_rng(0)
    T = rng.normal(size=(3, 3, 3))
    R = curvature_from_table(T)
    # R(X_i, X_j) X_k = nabla_i nabla_j X_k - nabla_j nabla_i X_k - nabla_[X_i, X_j] X_k
    i, j, k = 0, 1, 2
    expected = T[j, k] @ T[i] - T[i, k] @ T[j] - BRACKETS[i, j] @ T[:, k]
    np.testing.assert_allclose(R[i, j, k], expected, rtol=1e-13)


@pytest.mark.parametrize("name", ["LC", "SvK-1", "svk_2", "ADAPTED"])
def test_kind_aliases(name):
    assert isinstance(ConnectionKind.parse(name), ConnectionKind)


def test_unknown_kind():
    with pytest.raises(ValueError):
        ConnectionKind.parse("tanaka")
