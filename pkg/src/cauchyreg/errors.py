"""Exception types shared across the library."""


class CauchyRegError(Exception):
    """Base class for library errors."""


class CapabilityError(CauchyRegError):
    """Requested derivative order exceeds what the parametrization provides."""


class DegenerateParametrizationError(CauchyRegError):
    """|gamma'(t)| vanished at a sampled parameter."""


class AmbiguousWindingError(CauchyRegError):
    """Discrete winding number too far from an integer; refine the grid."""


class GeometryError(CauchyRegError):
    """Invalid geometric configuration (branch cut crossing, origin outside, ...)."""


class OrderError(CauchyRegError, ValueError):
    """Interpolation order incompatible with the requested operation."""


class ConfigError(CauchyRegError, ValueError):
    """Experiment configuration failed schema or geometric validation."""


class NonConvergenceError(CauchyRegError):
    """Iterative solver failed to reach the requested tolerance."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = list(residuals) if residuals is not None else []
