"""Exception types shared across the package.

Two broad families matter to callers: input problems (``ScenarioError``,
``GeometryError``) and numerical failures (``NumericalError`` subclasses).
The CLI maps the former to exit code 2 and the latter to exit code 3.
"""


class TadError(Exception):
    """Base class for all package-specific errors."""


class ScenarioError(TadError, ValueError):
    """A scenario field violates its documented invariant.

    ``field`` names the offending input so front ends can report it.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class GeometryError(TadError, ValueError):
    """Degenerate construction: coincident foci, undefined angles, or a
    speed-ratio regime outside the fast-defender analysis."""


class SingularityError(TadError, ArithmeticError):
    """A denominator that the optimality conditions assume nonzero vanished
    (singular heading feedback or an interception point on top of an agent)."""


class NumericalError(TadError, RuntimeError):
    """An iterative method failed to converge."""


class RootingError(NumericalError):
    """Polynomial root iteration did not reach the requested tolerance."""


class ShootingError(NumericalError):
    """Boundary-value shooting did not converge; carries the best iterate."""

    def __init__(self, message: str, best_iterate=None, residual_norm=None):
        self.best_iterate = best_iterate
        self.residual_norm = residual_norm
        super().__init__(message)
