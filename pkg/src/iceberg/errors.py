"""Exception types raised by the engine.

Everything that is the caller's fault (bad files, bad arguments, empty
scopes) derives from :class:`InputError`; the CLI maps that family to exit
status 1 and anything else to 2.
"""


class IcebergError(Exception):
    """Base class for all engine errors."""


class InputError(IcebergError):
    """Invalid input data or arguments."""


class ParseError(InputError):
    """A data file could not be parsed.

    ``path`` and ``line`` locate the offending record when known (line numbers
    are 1-based and count the header as line 1).
    """

    def __init__(self, message, path=None, line=None):
        self.path = str(path) if path is not None else None
        self.line = line
        where = ""
        if self.path is not None:
            where = self.path if line is None else f"{self.path}:{line}"
            where += ": "
        super().__init__(where + message)


class RangeError(InputError):
    """A numeric value lies outside its permitted range."""


class DuplicateError(InputError):
    """A key that must be unique appears more than once."""


class NotFoundError(InputError, KeyError):
    """A referenced occupation, region, or skill does not exist."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""
