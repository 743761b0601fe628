"""Exception types shared across the library."""


class PathTransError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(PathTransError):
    pass


class ModuleMismatch(PathTransError):
    pass


class GridMismatch(PathTransError):
    pass


class SingularLog(PathTransError):
    pass


class MarginViolation(PathTransError):
    pass


class NonComposable(PathTransError):
    pass


class NotComposable(NonComposable):
    # morphism-level composability failure; subtype of the path-level error
    pass


class NotALoop(PathTransError):
    pass


class OutOfChart(PathTransError):
    pass


class IntegratorDiverged(PathTransError):
    pass


class ProjectionMismatch(PathTransError):
    pass


class ConfigError(PathTransError):
    pass
