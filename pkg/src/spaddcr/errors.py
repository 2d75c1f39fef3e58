"""Exception and warning types shared across the package."""


class SpadDcrError(Exception):
    """Base class for all package errors."""


class DataError(SpadDcrError, ValueError):
    """Invalid or inconsistent physics data.

    ``row`` is the 1-based line number in the source file when the error
    came from parsing one.
    """

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class DomainError(DataError):
    """An energy (or energy range) falls outside a table's domain."""

    def __init__(self, message, domain=None):
        self.domain = domain
        if domain is not None:
            message = f"{message} (valid domain [{domain[0]:.6g}, {domain[1]:.6g}] MeV)"
        super().__init__(message)


class PipelineError(DataError):
    """A data or domain failure inside a named stage of a scenario run."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")


class ConfigError(SpadDcrError, ValueError):
    """Invalid scenario configuration; ``location`` names the offending key."""

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class SpadDcrWarning(UserWarning):
    """Base class for modelling caveats surfaced in reports."""


class GammaNielClampWarning(SpadDcrWarning):
    pass


class LowTemperatureWarning(SpadDcrWarning):
    pass


class IntegralSpectrumWarning(SpadDcrWarning):
    pass


class SpeciesCalibrationWarning(SpadDcrWarning):
    pass
