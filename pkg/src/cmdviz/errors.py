"""Exception hierarchy shared by every module.

Each class carries a ``category`` used by the command line driver to build
its one-line ``error: <category>: <detail>`` diagnostics.
"""


class CmdVizError(Exception):
    category = "error"


class ValidationError(CmdVizError, ValueError):
    """Input data violates a structural or numeric invariant."""

    category = "validation"


class ParseError(ValidationError):
    """Input text is not syntactically valid."""

    category = "parse"

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ConfigError(CmdVizError, ValueError):
    category = "config"


class UsageError(CmdVizError, ValueError):
    """A function was called with arguments that break its preconditions."""

    category = "usage"
