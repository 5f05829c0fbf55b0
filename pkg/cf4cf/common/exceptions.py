# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

# CF4CF Exceptions


class Cf4cfException(Exception):
    """
    Base class of all errors raised by the toolbox.

    Keyword arguments are kept as machine readable context and reported by
    :meth:`to_dict`, which the command line interface prints on failure.
    """

    def __init__(self, message: str = "", **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": self.message, **self.context}


class InvalidInput(Cf4cfException, ValueError):
    pass


class ConfigError(InvalidInput):
    pass


class IncompleteTable(Cf4cfException):
    def __init__(self, message: str = "", missing: list[tuple] | None = None, **context):
        self.missing = [tuple(pair) for pair in missing or []]
        super().__init__(message, missing=[list(pair) for pair in self.missing], **context)


class ParseError(Cf4cfException):
    def __init__(
        self, message: str = "", path: str | None = None, line: int | None = None, **context
    ):
        self.path = path
        self.line = line
        super().__init__(message, path=path, line=line, **context)


class DuplicateEntry(ParseError):
    pass
