"""Exception types shared across the package."""


class PbnError(Exception):
    """Base class for all errors raised by this package."""


class ModelFormatError(PbnError):
    """A model file is syntactically or semantically invalid.

    Carries the 1-based line (and, where known, column) of the offending
    input so the CLI can point at it.
    """

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line is not None and self.col is not None:
            return f"line {self.line}, col {self.col}: {self.message}"
        if self.line is not None:
            return f"line {self.line}: {self.message}"
        return self.message


class ResourceLimitError(PbnError):
    """A configured cap (matrix size, subset enumeration, step budget) was hit."""


class InfeasibleCoverError(PbnError):
    """No measurement set can separate every requested pair-state."""
