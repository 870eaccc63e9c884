"""Exception types raised across the package."""


class AnchError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class DataError(AnchError, ValueError):
    """Malformed or unusable input data."""

    exit_code = 3


class DivergenceError(AnchError, FloatingPointError):
    """A network produced a non-finite value during training."""

    exit_code = 5

    def __init__(self, message, epoch=None):
        super().__init__(message if epoch is None else f"{message} (epoch {epoch})")
        self.epoch = epoch


class ModelFormatError(AnchError):
    """A model file is corrupt, truncated or from an unsupported version."""

    exit_code = 6
