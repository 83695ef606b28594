"""
Exception hierarchy shared by the numeric modules, the services and the CLI.

Each error carries the process exit code the command line reports for it.
"""


class GestureRadarError(Exception):
    """Base class for every error raised by the package"""

    exit_code: int = 1

    def __init__(self, message: str, details: list[str] | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or []

    def __str__(self) -> str:
        if not self.details:
            return self.message
        return self.message + "\n" + "\n".join(f"  - {d}" for d in self.details)


class InvalidArgumentError(GestureRadarError, ValueError):
    """An argument is outside the domain an operation accepts"""

    exit_code = 2


class FramingError(GestureRadarError, ValueError):
    """A sample stream or CE field does not have the expected length"""

    exit_code = 2


class DegenerateFitError(GestureRadarError, ValueError):
    """Least-squares fit without at least two distinct time instants"""

    exit_code = 4


class SchemaError(GestureRadarError):
    """A scene or config file does not parse against its schema"""

    exit_code = 2


class RecordingMismatchError(GestureRadarError):
    """A tap recording disagrees with the pipeline configuration"""

    exit_code = 3


class NumericError(GestureRadarError):
    """Non-finite values or a failed numeric step during a run"""

    exit_code = 4
