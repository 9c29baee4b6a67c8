"""Exception and warning types shared across the toolkit.

The CLI maps these onto exit codes: schema problems exit 2, numerical
failures exit 3, ill-posed data conditions exit 4.
"""


class OffbeamError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(OffbeamError):
    """Scenario file missing fields or failing schema validation."""


class DomainError(OffbeamError, ValueError):
    """Input outside the mathematical domain of an operation."""


class UnsupportedBranchError(OffbeamError):
    """Operation called on a parameter branch it does not implement."""


class ResolutionError(OffbeamError):
    """Grid or sample set too coarse to evaluate without aliasing."""


class TailDecayError(OffbeamError):
    """Profile or sinogram not decayed at the edge of its support
    (aperture too small relative to the beam width)."""


class NoSignalError(OffbeamError):
    """Measurement set carries no usable intensity."""


class DegenerateRidgeError(OffbeamError):
    """Detector spot has no preferred direction (eigenvalue ratio
    below the configured threshold)."""


class DegenerateTriangulationError(OffbeamError):
    """Detector planes are parallel; no intersection line exists."""


class InvalidExponentError(OffbeamError):
    """Recovered decay exponent implies a nonpositive fractional order."""


class ReliabilityError(OffbeamError):
    """Monte Carlo estimate failed its convergence diagnostic."""


class IllPosednessError(OffbeamError):
    """Base class for failures caused by ill-posed measurement data."""


class NoSolutionError(IllPosednessError):
    """Root bracket does not contain a solution."""


class InconsistentSpreadError(IllPosednessError):
    """Beam width does not grow between stations; geometry inconsistent."""


class IllPosedDeconvolutionError(IllPosednessError):
    """Spectral deconvolution would amplify beyond the configured bound
    over most of the usable band."""


class NonphysicalAttenuationWarning(UserWarning):
    """Mass ratio implies a nonpositive attenuation coefficient."""


class ModelMismatchWarning(UserWarning):
    """Recovered exponent fell outside the supported fractional range
    and was clamped."""


class LowSignalWarning(UserWarning):
    """Ray misses the beam support; measurement returned as zero."""


class AsymmetryWarning(UserWarning):
    """Sinogram asymmetry exceeds the alignment tolerance."""
