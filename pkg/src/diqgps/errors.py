class DIQGPSError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(DIQGPSError, ValueError):
    """Malformed quantum objects: wrong shapes, non-Hermitian, non-unitary."""


class DataError(DIQGPSError, ValueError):
    """Inconsistent or corrupt measurement data."""


class InsufficientDataError(DataError):
    """Too few rounds to estimate a correlation cell."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class TamperDetectedError(DataError):
    """A carrier pair violated the Manchester rule."""

    def __init__(self, message, pair_index=None):
        super().__init__(message)
        self.pair_index = pair_index


class ConfigError(DIQGPSError, ValueError):
    """Invalid scenario configuration.  ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class EncodingCapacityError(ConfigError):
    """Timestamp does not fit the codec, or the codec does not fit the session."""
