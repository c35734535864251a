"""Exception types shared across the package."""


class FracgelError(Exception):
    """Base class for toolkit errors."""


class SchemaError(FracgelError):
    """Input file does not match the documented CSV schema."""


class NonFiniteSampleError(FracgelError):
    """A sample value is NaN or infinite."""


class TailModelError(FracgelError):
    """Unknown or unusable far-field tail model."""


class DomainError(FracgelError):
    """A requested ball, window or point leaves the sampled region."""


class SupportError(FracgelError):
    """A test function violates its compact-support requirement."""


class CertificateError(FracgelError):
    """A construction-time certificate (kernel mass, residual) failed."""


class CalibrationError(FracgelError):
    """Calibration spread exceeded its tolerance."""


class DegenerateFitError(FracgelError):
    """A least-squares fit has no usable slope."""


class ScaleUnderflowError(FracgelError):
    """A requested scale is below the resolvable grid resolution."""
