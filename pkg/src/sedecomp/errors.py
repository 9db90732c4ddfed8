"""Exception types shared across the toolkit, carrying CLI exit codes."""

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


class SedecompError(Exception):
    """Base class for all toolkit errors."""

    exit_code = EXIT_VALIDATION
    kind = "error"


class ValidationError(SedecompError):
    """Bad inputs or arguments: shape/rate mismatches, out-of-range values."""

    kind = "validation"


class DegenerateBasisError(SedecompError):
    """Speech/noise references too close to collinear for a meaningful plane."""

    exit_code = EXIT_NUMERICAL
    kind = "degenerate-basis"


class UndefinedMetricError(SedecompError):
    """Energy ratio with zero numerator and denominator, or a constant reference."""

    exit_code = EXIT_NUMERICAL
    kind = "undefined-metric"


class NonColaError(SedecompError):
    """Window/hop pair that cannot be inverted by overlap-add."""

    kind = "non-cola"


class ManifestError(SedecompError):
    """Structurally invalid manifest line (bad JSON, keys, duplicate ids)."""

    kind = "manifest"


class WavFormatError(SedecompError):
    """Malformed or unsupported WAV file."""

    exit_code = EXIT_IO
    kind = "wav-format"


class DataIOError(SedecompError):
    """Operating-system level I/O failure (missing file, unreadable path)."""

    exit_code = EXIT_IO
    kind = "io"
