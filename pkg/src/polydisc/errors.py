"""Exception hierarchy shared by all polydisc modules."""


class PolydiscError(Exception):
    """Base class for every error raised by the library."""


class DomainError(PolydiscError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class AliasingError(DomainError):
    """Too few boundary nodes for the requested coefficient degree."""

    def __init__(self, message, axis=None):
        super().__init__(message)
        self.axis = axis


class ResourceError(PolydiscError):
    """A grid or node budget would be exceeded."""


class EvaluationError(PolydiscError):
    """A function could not be evaluated at some point."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class IntegrationError(EvaluationError):
    """The integrand failed at a quadrature node."""


class StepUnderflowError(DomainError):
    """A finite-difference step became too small to be meaningful."""


class ExtensionError(PolydiscError):
    """No admissible disc was found for a removable-singularity extension."""

    def __init__(self, message, blocked=()):
        super().__init__(message)
        self.blocked = list(blocked)


class ResolutionError(PolydiscError):
    """A sampled estimate could not be resolved on the working grid."""


class DegreeCapError(ResourceError):
    """A truncation criterion was not met below the degree cap."""


class ParseError(PolydiscError, ValueError):
    """Syntax error in an expression, with 1-based line and column."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class AccuracyWarning(UserWarning):
    """The result is computed but its quadrature accuracy is degraded."""


class DegenerateCurveWarning(UserWarning):
    """The curve has zero length; the integral is returned as zero."""
