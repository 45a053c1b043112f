"""Error codes and exceptions raised by the parser."""

from __future__ import annotations

import enum


class ErrorCode(enum.IntEnum):
    """Closed set of failure codes. The numeric values are shared with the compiled core."""

    SUCCESS = 0
    UTF8_ERROR = 1
    STRING_ERROR = 2
    NUMBER_ERROR = 3
    TAPE_ERROR = 4
    DEPTH_ERROR = 5
    CAPACITY = 6
    EMPTY = 7


class ParseError(ValueError):
    """A document was rejected.

    ``offset`` is the byte offset where the failure was detected, or ``None``
    when the failing check does not track positions (UTF-8 validation).
    """

    def __init__(self, code: ErrorCode, offset: int | None = None, detail: str = ""):
        self.code = ErrorCode(code)
        self.offset = offset
        self.detail = detail
        msg = self.code.name
        if offset is not None:
            msg += f" at byte {offset}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)

    def __reduce__(self):
        return (type(self), (self.code, self.offset, self.detail))


class Utf8Error(ParseError):
    def __init__(self, offset: int | None = None, detail: str = ""):
        super().__init__(ErrorCode.UTF8_ERROR, offset, detail)

    def __reduce__(self):
        return (type(self), (self.offset, self.detail))


def raise_for(code: int, offset: int | None = None, detail: str = "") -> None:
    if code == ErrorCode.UTF8_ERROR:
        raise Utf8Error(offset, detail)
    raise ParseError(ErrorCode(code), offset, detail)
