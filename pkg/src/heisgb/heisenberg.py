"""Left-invariant frame, contact form and the metric family g_L.

Tangent vectors are passed around as frame coefficients ``(a1, a2, a3)`` with
respect to ``X1 = d1 - x2/2 d3``, ``X2 = d2 + x1/2 d3``, ``X3 = d3``, stored in
the last axis of a float array.  Coordinate vectors are converted once, on the
way in, by :func:`frame_from_coordinate`.

The group law ``(a,b,c)*(x,y,z) = (a+x, b+y, c+z-(xb-ya)/2)`` is the one these
fields are left-invariant for; it is not needed by any computation here.

The horizontal-point test uses the contact form ``w = dx3 + (x2 dx1 - x1 dx2)/2``
evaluated on the velocity, which is also the X3 frame coefficient of that
velocity.
"""

from __future__ import annotations

import numpy as np

# Bracket table [X_i, X_j] as frame coefficients; only [X1, X2] = X3 is nonzero.
BRACKETS = np.zeros((3, 3, 3))
BRACKETS[0, 1] = (0.0, 0.0, 1.0)
BRACKETS[1, 0] = (0.0, 0.0, -1.0)


def frame_fields(p) -> np.ndarray:
    """Coordinate components of X1, X2, X3 at ``p``; shape ``(..., 3, 3)``.

    Row ``a`` holds the coordinate vector of ``X_{a+1}``.
    """
    p = np.asarray(p, dtype=float)
    out = np.zeros(p.shape[:-1] + (3, 3))
    out[..., 0, 0] = 1.0
    out[..., 0, 2] = -p[..., 1] / 2.0
    out[..., 1, 1] = 1.0
    out[..., 1, 2] = p[..., 0] / 2.0
    out[..., 2, 2] = 1.0
    return out


def omega(p, v) -> np.ndarray:
    """Contact form at ``p`` applied to the coordinate vector ``v``."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    return v[..., 2] + (p[..., 1] * v[..., 0] - p[..., 0] * v[..., 1]) / 2.0


def frame_from_coordinate(p, v) -> np.ndarray:
    """Frame coefficients of the coordinate vector ``v`` based at ``p``."""
    v = np.asarray(v, dtype=float)
    out = np.array(v, dtype=float, copy=True)
    out[..., 2] = omega(p, v)
    return out


def coordinate_from_frame(p, a) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    a = np.asarray(a, dtype=float)
    out = np.array(a, dtype=float, copy=True)
    out[..., 2] = a[..., 2] - (p[..., 1] * a[..., 0] - p[..., 0] * a[..., 1]) / 2.0
    return out


def omega_dot(pos, vel, acc) -> np.ndarray:
    """d/dt of w(gamma'(t)) from position, velocity and acceleration.

    The velocity cross terms cancel, leaving ``g3'' + (g2 g1'' - g1 g2'')/2``.
    """
    pos = np.asarray(pos, dtype=float)
    acc = np.asarray(acc, dtype=float)
    return acc[..., 2] + (pos[..., 1] * acc[..., 0] - pos[..., 0] * acc[..., 1]) / 2.0


def inner_L(L: float, u, v) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] + L * u[..., 2] * v[..., 2]


def norm_L(L: float, v) -> np.ndarray:
    return np.sqrt(inner_L(L, v, v))


def check_metric_param(L: float) -> float:
    L = float(L)
    if not (L > 0 and np.isfinite(L)):
        raise ValueError(f"metric parameter L must be positive and finite, got {L}")
    return L


def directional(p, frame_vec, grad) -> np.ndarray:
    """Derivative of a function with coordinate gradient ``grad`` along ``frame_vec``."""
    coord = coordinate_from_frame(p, frame_vec)
    return np.sum(coord * np.asarray(grad, dtype=float), axis=-1)
