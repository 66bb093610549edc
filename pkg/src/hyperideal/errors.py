"""Exception types shared across the package."""


class HyperidealError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(HyperidealError, ValueError):
    """A problem/geometry/solution file violates its schema."""


class SurfaceError(HyperidealError, ValueError):
    """Gluing data does not describe a valid triangulated surface."""


class DomainError(HyperidealError, ValueError):
    """An angle tuple lies outside its admissible set."""


class SingularityError(HyperidealError, ValueError):
    """Evaluation requested at a singular point of the Lobachevsky derivative."""


class NotCoherentError(HyperidealError, ValueError):
    """An angle system fails the coherence constraints."""


class NotCriticalError(HyperidealError, ValueError):
    """Reconstruction requested at a point that is not a critical point."""


class PreconditionError(HyperidealError, ValueError):
    """A geometric precondition (triangle inequality, circle condition) fails."""


class ConvergenceError(HyperidealError, RuntimeError):
    """An iterative method exhausted its iteration budget."""
