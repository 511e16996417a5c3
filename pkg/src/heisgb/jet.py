"""Second-order forward-mode jets over three variables.

A :class:`Jet2` carries a value, its gradient and its Hessian with respect to
three slots.  Field expressions use the slots for ``(x1, x2, x3)``, chart
expressions for ``(s1, s2, -)`` and curve expressions only the first slot for
``t``.  All parts broadcast like numpy arrays, so one jet can hold a whole
batch of evaluation points: ``v`` has shape ``S``, ``d`` shape ``S + (3,)`` and
``h`` shape ``S + (6,)``.

The Hessian is stored as its six upper-triangular entries in the order
``(00, 01, 02, 11, 12, 22)`` so symmetry holds by construction.
"""

from __future__ import annotations

import numpy as np

# (i, j) index pairs of the packed Hessian.
HESS_PAIRS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
_I = np.array([i for i, _ in HESS_PAIRS])
_J = np.array([j for _, j in HESS_PAIRS])


def _sym_outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Packed ``a b^T + b a^T``."""
    return a[..., _I] * b[..., _J] + a[..., _J] * b[..., _I]


def _outer(a: np.ndarray) -> np.ndarray:
    """Packed ``a a^T``."""
    return a[..., _I] * a[..., _J]


def unpack_hessian(h: np.ndarray) -> np.ndarray:
    """Expand packed entries ``(..., 6)`` into full ``(..., 3, 3)`` matrices."""
    h = np.asarray(h, dtype=float)
    full = np.empty(h.shape[:-1] + (3, 3))
    for k, (i, j) in enumerate(HESS_PAIRS):
        full[..., i, j] = h[..., k]
        full[..., j, i] = h[..., k]
    return full


class Jet2:
    """Value, gradient and packed Hessian of a scalar function."""

    __slots__ = ("v", "d", "h")

    def __init__(self, v, d=None, h=None):
        self.v = np.asarray(v, dtype=float)
        self.d = np.zeros(self.v.shape + (3,)) if d is None else np.asarray(d, dtype=float)
        self.h = np.zeros(self.v.shape + (6,)) if h is None else np.asarray(h, dtype=float)

    @classmethod
    def constant(cls, value) -> "Jet2":
        return cls(value)

    @classmethod
    def variable(cls, value, slot: int) -> "Jet2":
        v = np.asarray(value, dtype=float)
        d = np.zeros(v.shape + (3,))
        d[..., slot] = 1.0
        return cls(v, d)

    @classmethod
    def first_order(cls, v, d) -> "Jet2":
        """A jet whose second derivatives are unknown.

        The Hessian is filled with NaN; values and gradients computed from such
        jets stay exact, anything second order reads as NaN.
        """
        v = np.asarray(v, dtype=float)
        return cls(v, d, np.full(v.shape + (6,), np.nan))

    @property
    def hessian(self) -> np.ndarray:
        return unpack_hessian(self.h)

    def __repr__(self) -> str:
        return f"Jet2(v={self.v!r}, d={self.d!r}, h={self.h!r})"

    # -- arithmetic -----------------------------------------------------

    @staticmethod
    def _lift(x) -> "Jet2":
        return x if isinstance(x, Jet2) else Jet2(x)

    def __neg__(self) -> "Jet2":
        return Jet2(-self.v, -self.d, -self.h)

    def __add__(self, other) -> "Jet2":
        o = Jet2._lift(other)
        return Jet2(self.v + o.v, self.d + o.d, self.h + o.h)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet2":
        o = Jet2._lift(other)
        return Jet2(self.v - o.v, self.d - o.d, self.h - o.h)

    def __rsub__(self, other) -> "Jet2":
        return Jet2._lift(other) - self

    def __mul__(self, other) -> "Jet2":
        if not isinstance(other, Jet2):
            c = np.asarray(other, dtype=float)
            return Jet2(self.v * c, self.d * c[..., None], self.h * c[..., None])
        a, b = self, other
        v = a.v * b.v
        d = a.v[..., None] * b.d + b.v[..., None] * a.d
        h = a.v[..., None] * b.h + b.v[..., None] * a.h + _sym_outer(a.d, b.d)
        return Jet2(v, d, h)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet2":
        if not isinstance(other, Jet2):
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> "Jet2":
        return Jet2._lift(other) * self.reciprocal()

    def apply(self, f0, f1, f2) -> "Jet2":
        """Chain rule for a scalar function with value/first/second derivative."""
        return Jet2(
            f0,
            f1[..., None] * self.d,
            f1[..., None] * self.h + f2[..., None] * _outer(self.d),
        )

    def reciprocal(self) -> "Jet2":
        inv = 1.0 / self.v
        return self.apply(inv, -inv * inv, 2.0 * inv * inv * inv)

    def square(self) -> "Jet2":
        return self * self

    def int_power(self, n: int) -> "Jet2":
        """Integer power by repeated squaring; negative ``n`` via reciprocal."""
        if n == 0:
            return Jet2(np.ones_like(self.v), np.zeros_like(self.d), np.zeros_like(self.h))
        if n < 0:
            return self.int_power(-n).reciprocal()
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def real_power(self, b: float) -> "Jet2":
        """``self ** b`` for a positive base and real exponent."""
        x = self.v
        return self.apply(x**b, b * x ** (b - 1.0), b * (b - 1.0) * x ** (b - 2.0))

    def sqrt(self) -> "Jet2":
        s = np.sqrt(self.v)
        return self.apply(s, 0.5 / s, -0.25 / (s * self.v))

    def exp(self) -> "Jet2":
        e = np.exp(self.v)
        return self.apply(e, e, e)

    def log(self) -> "Jet2":
        inv = 1.0 / self.v
        return self.apply(np.log(self.v), inv, -inv * inv)

    def sin(self) -> "Jet2":
        s, c = np.sin(self.v), np.cos(self.v)
        return self.apply(s, c, -s)

    def cos(self) -> "Jet2":
        s, c = np.sin(self.v), np.cos(self.v)
        return self.apply(c, -s, -c)

    def tan(self) -> "Jet2":
        t = np.tan(self.v)
        sec2 = 1.0 + t * t
        return self.apply(t, sec2, 2.0 * t * sec2)

    def sinh(self) -> "Jet2":
        s, c = np.sinh(self.v), np.cosh(self.v)
        return self.apply(s, c, s)

    def cosh(self) -> "Jet2":
        s, c = np.sinh(self.v), np.cosh(self.v)
        return self.apply(c, s, c)

    def atan(self) -> "Jet2":
        x = self.v
        den = 1.0 / (1.0 + x * x)
        return self.apply(np.arctan(x), den, -2.0 * x * den * den)

    def abs(self) -> "Jet2":
        sgn = np.sign(self.v)
        return self.apply(np.abs(self.v), sgn, np.zeros_like(sgn))
