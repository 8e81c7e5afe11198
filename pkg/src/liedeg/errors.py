"""Error taxonomy shared across the package.

Three families, mapped to distinct CLI exit codes:

* ConfigError        -- bad scenario names, malformed configs, bad labels
* NumericGuardError  -- a numerical precondition failed (inconsistent or
                        degenerate degree data, non-Hermitian input, ...)
* output / IO errors -- plain OSError from the standard library
"""


class ConfigError(ValueError):
    """Invalid configuration or parameters."""


class TagMismatchError(ConfigError):
    """Operands belong to different groups."""


class NumericGuardError(RuntimeError):
    """A numerical precondition was violated."""


class InconsistentDegreeError(NumericGuardError):
    """Pointwise degree norm disagrees with the declared constant."""


class DegenerateDegreeError(NumericGuardError):
    """Degree too close to zero for straightening."""


class NonHermitianError(NumericGuardError):
    """Matrix expected Hermitian fails the symmetry check."""
