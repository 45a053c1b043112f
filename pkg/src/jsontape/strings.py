"""String validation and normalization into the length-prefixed string buffer."""

from __future__ import annotations

import re
import struct

from .errors import ErrorCode, ParseError

ESCAPES = {
    0x22: 0x22,  # \"
    0x5C: 0x5C,  # \\
    0x2F: 0x2F,  # \/
    0x62: 0x08,  # \b
    0x66: 0x0C,  # \f
    0x6E: 0x0A,  # \n
    0x72: 0x0D,  # \r
    0x74: 0x09,  # \t
}
_HEX = frozenset(b"0123456789abcdefABCDEF")
_CONTROL = re.compile(rb"[\x00-\x1f]")
_LENGTH = struct.Struct("<I")


def _fail(offset: int, detail: str) -> ParseError:
    return ParseError(ErrorCode.STRING_ERROR, offset, detail)


def _hex4(data: bytes, i: int, quote: int) -> int:
    digits = data[i : i + 4]
    if len(digits) != 4 or not all(c in _HEX for c in digits):
        raise _fail(quote, "bad \\u escape")
    return int(digits, 16)


def parse_string(data: bytes, offset: int, dest: bytearray) -> tuple[int, int]:
    """Normalize the string whose opening quote is ``data[offset]``.

    Appends a little-endian 32-bit length and the UTF-8 payload to ``dest``.
    Returns ``(entry_offset, end)`` where ``end`` is one past the closing
    quote. Errors carry the offset of the opening quote. ``data`` is assumed
    to be valid UTF-8 (stage 1 checked it).
    """
    entry = len(dest)
    dest += b"\0\0\0\0"
    i = offset + 1
    while True:
        quote = data.find(b'"', i)
        if quote < 0:
            raise _fail(offset, "unterminated string")
        backslash = data.find(b"\\", i, quote)
        stop = quote if backslash < 0 else backslash
        if _CONTROL.search(data, i, stop):
            raise _fail(offset, "unescaped control character")
        dest += data[i:stop]
        if backslash < 0:
            i = quote + 1
            break
        code = data[backslash + 1]
        if code in ESCAPES:
            dest.append(ESCAPES[code])
            i = backslash + 2
            continue
        if code != 0x75:
            raise _fail(offset, "invalid escape")
        cp = _hex4(data, backslash + 2, offset)
        i = backslash + 6
        if 0xD800 <= cp <= 0xDBFF:
            if data[i : i + 2] != b"\\u":
                raise _fail(offset, "high surrogate without low surrogate")
            low = _hex4(data, i + 2, offset)
            if not 0xDC00 <= low <= 0xDFFF:
                raise _fail(offset, "high surrogate without low surrogate")
            cp = 0x10000 + ((cp - 0xD800) << 10) + (low - 0xDC00)
            i += 6
        elif 0xDC00 <= cp <= 0xDFFF:
            raise _fail(offset, "lone low surrogate")
        dest += chr(cp).encode("utf-8")
    _LENGTH.pack_into(dest, entry, len(dest) - entry - 4)
    return entry, i


def read_string(buffer: bytes, entry: int) -> bytes:
    """Payload bytes of the string buffer entry at ``entry``."""
    (length,) = _LENGTH.unpack_from(buffer, entry)
    return bytes(buffer[entry + 4 : entry + 4 + length])
