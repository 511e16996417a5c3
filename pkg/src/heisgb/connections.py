"""The four affine connections: coefficient tables and curvature.

A coefficient table is an array ``G`` of shape ``(3, 3, 3)`` with
``G[i, j] = nabla_{X_{i+1}} X_{j+1}`` in frame coefficients.  Each table is
affine in ``L`` and kept as a constant part plus an ``L``-proportional part.

Kinds:

* ``LEVI_CIVITA`` - the Riemannian connection of g_L.
* ``SVK1`` - Schouten-Van Kampen connection for the splitting H + span{X3}.
* ``SVK2`` - Schouten-Van Kampen connection for span{X2, X3} + span{X1}.
* ``ADAPTED`` - the flat connection with all frame derivatives zero.
"""

from __future__ import annotations

import enum

import numpy as np

from .heisenberg import BRACKETS, check_metric_param, inner_L


class ConnectionKind(enum.Enum):
    LEVI_CIVITA = "levi-civita"
    SVK1 = "svk1"
    SVK2 = "svk2"
    ADAPTED = "adapted"

    @classmethod
    def parse(cls, name) -> "ConnectionKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        aliases = {"lc": "levi-civita", "levicivita": "levi-civita", "svk-1": "svk1", "svk-2": "svk2"}
        key = aliases.get(key, key)
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown connection kind {name!r}; use one of {[k.value for k in cls]}")


def _polynomial_tables() -> dict:
    tables = {}
    z = lambda: (np.zeros((3, 3, 3)), np.zeros((3, 3, 3)))  # noqa: E731

    const, lin = z()
    const[0, 1] = (0, 0, 0.5)
    const[1, 0] = (0, 0, -0.5)
    lin[0, 2] = (0, -0.5, 0)
    lin[2, 0] = (0, -0.5, 0)
    lin[1, 2] = (0.5, 0, 0)
    lin[2, 1] = (0.5, 0, 0)
    tables[ConnectionKind.LEVI_CIVITA] = (const, lin)

    const, lin = z()
    lin[2, 0] = (0, -0.5, 0)
    lin[2, 1] = (0.5, 0, 0)
    tables[ConnectionKind.SVK1] = (const, lin)

    const, lin = z()
    const[0, 1] = (0, 0, 0.5)
    lin[0, 2] = (0, -0.5, 0)
    tables[ConnectionKind.SVK2] = (const, lin)

    tables[ConnectionKind.ADAPTED] = z()
    for const, lin in tables.values():
        const.setflags(write=False)
        lin.setflags(write=False)
    return tables


COEFFICIENT_POLYNOMIALS = _polynomial_tables()


def coeff_table(kind, L: float) -> np.ndarray:
    """Frame coefficients of ``nabla_{X_i} X_j`` for the metric parameter ``L``."""
    kind = ConnectionKind.parse(kind)
    L = check_metric_param(L)
    const, lin = COEFFICIENT_POLYNOMIALS[kind]
    return const + L * lin


def covariant_derivative(table, velocity, field, field_dot) -> np.ndarray:
    """``nabla_{velocity} V`` for a frame field with coefficients ``field``.

    ``field_dot`` is the derivative of the coefficients along the velocity;
    the frame itself is left-invariant, so the table supplies the rest.
    """
    return np.asarray(field_dot, dtype=float) + np.einsum(
        "...i,...j,ijk->...k", velocity, field, table
    )


def curvature_from_table(table) -> np.ndarray:
    """``R[i, j, k] = R(X_i, X_j) X_k`` for a constant coefficient table."""
    table = np.asarray(table, dtype=float)
    first = np.einsum("jkm,imn->ijkn", table, table)
    second = np.einsum("ikm,jmn->ijkn", table, table)
    bracket = np.einsum("ijm,mkn->ijkn", BRACKETS, table)
    return first - second - bracket


def curvature_tensor(kind, L: float, i: int | None = None, j: int | None = None, k: int | None = None):
    """Curvature tensor of the connection; with indices (1-based) one entry."""
    R = curvature_from_table(coeff_table(kind, L))
    if i is None:
        return R
    for idx in (i, j, k):
        if idx not in (1, 2, 3):
            raise ValueError(f"frame indices run over 1..3, got {(i, j, k)}")
    return R[i - 1, j - 1, k - 1]


def sectional(kind, L: float, e1, e2, table=None) -> np.ndarray:
    """``-<R(e1, e2) e1, e2>_L`` by multilinear expansion (not normalised)."""
    if table is None:
        table = coeff_table(kind, L)
    R = curvature_from_table(table)
    Re = np.einsum("...i,...j,...k,ijkn->...n", e1, e2, e1, R)
    return -inner_L(L, Re, e2)


def torsion_from_table(table) -> np.ndarray:
    """``T(X_i, X_j) = nabla_i X_j - nabla_j X_i - [X_i, X_j]``."""
    table = np.asarray(table, dtype=float)
    return table - np.transpose(table, (1, 0, 2)) - BRACKETS


def metric_defect(table, L: float) -> float:
    """Largest ``|<nabla_i X_j, X_k> + <X_j, nabla_i X_k>|`` over the frame."""
    gram = np.diag([1.0, 1.0, L])
    lowered = np.asarray(table) @ gram  # [i, j, k] = <nabla_i X_j, X_k>
    return float(np.max(np.abs(lowered + np.transpose(lowered, (0, 2, 1)))))
