"""Exception types shared across the engine."""

from __future__ import annotations

import numpy as np


class HeisError(Exception):
    """Base class for engine errors."""


class InputError(HeisError, ValueError):
    """Malformed or out-of-range user input."""


class NonRegularCurveError(HeisError, ValueError):
    def __init__(self, t, speed):
        self.t = float(t)
        self.speed = float(speed)
        super().__init__(f"curve is not regular at t={self.t:.17g} (|velocity|={self.speed:.3g})")


class CharacteristicPointError(HeisError, ValueError):
    """The horizontal gradient of the defining function vanishes."""

    def __init__(self, point, l):
        self.point = tuple(float(x) for x in np.ravel(point))
        self.l = float(l)
        super().__init__(f"characteristic point {self.point} (|grad_H u|={self.l:.3g})")


class OffSurfaceError(HeisError, ValueError):
    def __init__(self, point, residual):
        self.point = tuple(float(x) for x in np.ravel(point))
        self.residual = float(residual)
        super().__init__(f"point {self.point} is not on the surface (u={self.residual:.3g})")


class TangencyError(HeisError, ValueError):
    def __init__(self, t, defect):
        self.t = float(t)
        self.defect = float(defect)
        super().__init__(
            f"curve leaves the surface at t={self.t:.17g} (normal defect {self.defect:.3g})"
        )


class UnsupportedKindError(HeisError, ValueError):
    pass


class DegenerateDenominatorError(HeisError, ArithmeticError):
    pass


class NumericContractError(HeisError, ArithmeticError):
    """An internal numeric invariant failed; indicates a bug, not bad input."""


class IntegrationError(HeisError, RuntimeError):
    pass


class NonIntegrableSingularityError(IntegrationError):
    def __init__(self, radii, values):
        self.radii = list(radii)
        self.values = list(values)
        table = ", ".join(f"{r:.3g}: {v:.12g}" for r, v in zip(self.radii, self.values))
        super().__init__(
            "interior integral does not settle as the excision radius shrinks "
            f"({table}); |grad_H u|^-1 is likely not summable near the characteristic set"
        )


class OrientationError(HeisError, ValueError):
    pass
