"""Exception types shared across the package."""


class SqgError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(SqgError, ValueError):
    """Operands live on different spectral spaces or have wrong shapes."""


class ConfigError(SqgError, ValueError):
    """A run configuration is malformed, out of range, or has unknown keys."""


class NotPositiveDefinite(SqgError, ArithmeticError):
    """The weight operator lost positivity (margin at or below the floor)."""

    def __init__(self, margin: float, floor: float):
        self.margin = float(margin)
        self.floor = float(floor)
        super().__init__(
            f"weight operator not positive definite: margin {margin:.6e} "
            f"<= floor {floor:.6e}"
        )


class BlowUpError(SqgError, ArithmeticError):
    """Time stepping produced non-finite coefficients.

    integrate() attaches the trajectory collected before the halt as
    the `partial` attribute (last good states, per monitor cadence).
    """

    def __init__(self, t: float, message: str = ""):
        self.t = float(t)
        self.partial = None
        super().__init__(message or f"non-finite state at t={t:.6g}")


class ContinuationError(SqgError, ArithmeticError):
    """A monitored run violated the continuation criterion.

    Carries the breach time and margin; integrate() attaches the
    trajectory collected before the halt as the `partial` attribute.
    """

    def __init__(self, t: float, margin: float, floor: float):
        self.t = float(t)
        self.margin = float(margin)
        self.floor = float(floor)
        self.partial = None
        super().__init__(
            f"continuation criterion failed at t={t:.6g}: "
            f"margin {margin:.6e} <= floor {floor:.6e}"
        )


class ResolventError(SqgError, ArithmeticError):
    """A resolvent solve in the contour quadrature failed."""

    def __init__(self, z: complex):
        self.z = complex(z)
        super().__init__(f"resolvent solve failed at z={z!r}")
