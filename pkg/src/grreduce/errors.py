"""Exception types raised by the geometric pipeline."""


class GeometryError(ValueError):
    """Base class for failures of a geometric construction."""


class IllConditioned(GeometryError):
    """A projection or intersection is numerically ill-posed."""


class NotDecomposable(GeometryError):
    """A Plücker vector violates the quadratic relations."""


class StepTooSmall(GeometryError):
    """A finite-difference step loses more than half the significant digits."""


class NotInChart(GeometryError):
    """A line touches the excluded loci of the reduction chart."""


class DegenerateFrame(GeometryError):
    """A fiber-chart frame cannot be built from the given base data."""


class RankDeficient(GeometryError):
    """A tangent frame is numerically rank deficient."""


class NoConvergence(GeometryError):
    """The fiber solver did not reach the requested moment values.

    The offending base point (if known) is kept on ``base`` so callers can
    report it.
    """

    def __init__(self, message, base=None, residual=None):
        super().__init__(message)
        self.base = base
        self.residual = residual
