class CaftError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(CaftError, ValueError):
    """Input violates a documented precondition."""


class FormatError(ValidationError):
    """A file could not be parsed.

    ``path`` and ``line`` locate the problem when known; ``line`` is 1-based.
    """

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = None if path is None else str(path)
        self.line = line
        where = ""
        if self.path is not None:
            where = self.path if line is None else f"{self.path}:{line}"
            where += ": "
        super().__init__(where + message)
        self.message = message


class UnsupportedImageError(FormatError):
    """Image uses a bit depth, colour type or container this codec refuses."""


class SymmetryError(CaftError, ArithmeticError):
    """An inverse transform produced a non-negligible imaginary part."""
