"""Exception hierarchy for the imputation lab.

Every error raised on purpose by the library derives from
ImputationLabError so the CLI can map it onto an exit code.
"""


class ImputationLabError(Exception):
    """Base class for all library errors."""


class DataError(ImputationLabError, ValueError):
    """Input data violates a precondition.

    Attributes:
        row: Zero-based data row of the offending cell, when known.
        column: Column name of the offending cell, when known.
    """

    def __init__(
        self, message: str, row: int | None = None, column: str | None = None
    ) -> None:
        super().__init__(message)
        self.row = row
        self.column = column


class ConfigError(ImputationLabError, ValueError):
    """Invalid parameters or configuration file."""


class UsageError(ImputationLabError):
    """Invalid command-line usage."""


class ExperimentCellError(ImputationLabError):
    """An error raised inside one experiment cell, tagged with its coordinates.

    Attributes:
        coordinates: Mapping of coordinate name (dataset, rate, seed, method, arm)
            to value.
        cause: The original exception.
    """

    def __init__(self, coordinates: dict[str, object], cause: Exception) -> None:
        where = ", ".join(f"{k}={v}" for k, v in coordinates.items())
        super().__init__(f"experiment cell failed ({where}): {cause}")
        self.coordinates = coordinates
        self.cause = cause

    def __reduce__(self):
        return (self.__class__, (self.coordinates, self.cause))
