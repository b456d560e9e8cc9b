"""Exception types shared across the toolkit.

Validation errors (bad arguments, geometric preconditions) derive from
ValidationError; numerical failures (non-finite orbits, diverging
constructions) derive from NumericalError.  The CLI maps the former to
exit code 2 and the latter to exit code 3.
"""


class CircloidsError(Exception):
    pass


class ValidationError(CircloidsError):
    pass


class NumericalError(CircloidsError):
    pass


class WindowTooSmall(ValidationError):
    """A set comes within two cells of a y-window margin, so questions of
    (un)boundedness cannot be answered on this window."""


class NotEssential(ValidationError):
    """Input raster is not an essential annular continuum where one is required."""


class NotThin(ValidationError):
    """Input raster has interior at grid scale (a full 3x3 occupied block)."""


class EmptySet(ValidationError):
    pass


class NotDisjoint(ValidationError):
    pass


class RationalRho(ValidationError):
    """Rotation number is (too close to) rational where irrational is required."""


class TooManyGaps(ValidationError):
    """Gap system degenerate: requested gaps cannot be placed disjointly."""


class Overlap(ValidationError):
    """Members of a circloid orbit family overlap where wandering is required."""


class OrderViolation(ValidationError):
    """Cyclic order of family members does not match the rotation order."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ZoneDiscontinuity(ValidationError):
    """Piecewise map zones do not agree on a zone boundary."""


class InjectivityViolation(ValidationError):
    """A constructed map fails an injectivity / monotonicity check."""


class NonFinite(NumericalError):
    """An orbit or derived quantity left the realm of finite floats."""
