"""Exceptions raised on rejected input.

Everything subclasses ``ValueError`` so callers that only know about bad values keep working.
"""


class EvidenceLogicError(ValueError):
    """Root of every error this package raises on purpose."""


class InvalidInputError(EvidenceLogicError):
    """A state, set, group, model or file that breaks an operation's precondition."""


class FormulaSyntaxError(InvalidInputError):
    def __init__(self, message: str, text: str = "", line: int | None = None, column: int | None = None):
        self.text = text
        self.line = line
        self.column = column
        if line is not None and column is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class LanguageError(InvalidInputError):
    """A well-formed formula outside the language the operation accepts."""
