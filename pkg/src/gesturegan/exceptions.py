"""Exception hierarchy.

Validation problems derive from ``ValueError`` so callers that only care
about "bad input" can catch that; the CLI maps them to exit status 2.
"""


class GestureError(Exception):
    """Base class for all package errors."""


class ValidationError(GestureError, ValueError):
    """Input data violates a documented invariant."""


class RecordingFormatError(ValidationError):
    """A recording or pose-stream line could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FrameValidationError(ValidationError):
    """A parsed frame is structurally invalid (wrong joints, bad timestamp)."""

    def __init__(self, message, frame_index=None):
        self.frame_index = frame_index
        if frame_index is not None:
            message = f"frame {frame_index}: {message}"
        super().__init__(message)


class ConfigurationError(ValidationError):
    """A configuration value is out of its legal range."""


class DegenerateGeometryError(GestureError, ValueError):
    """A direction vector is too short to normalize.

    Retargeting treats this as a signal to hold the previous joint value.
    """


class TrainingDivergedError(GestureError, ArithmeticError):
    """A loss became NaN or infinite during adversarial training."""


class StageError(GestureError):
    """A pipeline stage failed; wraps the original exception."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
