"""Error taxonomy shared by the library and the command line front end.

Every failure raised on purpose falls into one of three buckets, and the
CLI maps each bucket to a fixed process exit code:

* ``ValidationError``   -- the input or configuration is malformed (exit 1)
* ``CapabilityError``   -- the request is well formed but outside the
  supported envelope, e.g. brute-force matching beyond n = 8 (exit 2)
* anything else         -- internal fault (exit 3)
"""

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CAPABILITY = 2
EXIT_INTERNAL = 3


class SpectralAugError(Exception):
    """Base class for all errors raised deliberately by this package."""

    category = "internal"
    exit_code = EXIT_INTERNAL


class ValidationError(SpectralAugError):
    """Malformed input, configuration, or argument."""

    category = "validation"
    exit_code = EXIT_VALIDATION


class CapabilityError(SpectralAugError):
    """Well-formed request outside the supported size/feature envelope."""

    category = "capability"
    exit_code = EXIT_CAPABILITY


class EstimationError(ValidationError):
    """A sampling-based estimate had no usable probes."""
