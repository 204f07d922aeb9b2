"""Exception types shared across the toolkit."""


class ApneaKitError(Exception):
    """Base class for toolkit errors."""


class FormatError(ApneaKitError):
    """A file does not conform to its expected layout (bad magic, missing
    sidecar, truncated payload, malformed CSV header)."""


class DataError(ApneaKitError):
    """A file parses but contains invalid data (NaN samples, negative
    durations, non-monotonic timestamps)."""


class NoPulsesError(ApneaKitError):
    """Pulse delineation found fewer than two trough landmarks."""


class InsufficientPulsesError(ApneaKitError):
    """Too few pulses for the requested feature computation (need N >= 3)."""
