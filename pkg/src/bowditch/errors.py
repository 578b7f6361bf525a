"""Exception types shared across the package."""


class BowditchError(Exception):
    """Base class for all errors raised by this package."""


class InvalidTriple(BowditchError, ValueError):
    """The trace triple does not lie on x^2 + y^2 + z^2 = xyz."""

    def __init__(self, triple, residual, bound):
        self.triple = triple
        self.residual = residual
        self.bound = bound
        super().__init__(
            f"triple {triple} is off the variety: residual {residual:.3e} > {bound:.3e}"
        )


class DegenerateEigenvalue(BowditchError, ValueError):
    """Trace is (numerically) +-2, so the eigenvalues coincide."""


class EllipticVertex(BowditchError, ValueError):
    """Trace lies in [-2, 2]; the eigenvalue has unit modulus and the fan does not grow."""


class ZeroCoefficient(BowditchError, ValueError):
    """One of the fan coefficients A, D vanishes (pure geometric neighbor sequence)."""


class MagnitudeOverflow(BowditchError, ArithmeticError):
    """A trace would exceed the saturation magnitude.

    ``log10_magnitude`` is the log10 of the magnitude that would have been produced.
    """

    def __init__(self, message, log10_magnitude=float("inf")):
        self.log10_magnitude = log10_magnitude
        super().__init__(message)


class InvalidSlope(BowditchError, ValueError):
    """Slope is not a reduced fraction p/q with q >= 0, or exceeds the navigation limit."""


class SpecInvalid(BowditchError, ValueError):
    """A slice specification failed validation."""


class LayerOutOfRange(BowditchError, IndexError):
    pass
