"""Stage 1: turn a padded document into its structural index."""

from __future__ import annotations

from array import array

from .bits import ScanCarry, scan_block
from .errors import ErrorCode, ParseError, Utf8Error
from .utf8 import Utf8State, first_invalid_offset

PADDING = 64
MAX_DOCUMENT_SIZE = 2**32 - 1
EXTRACT_SLACK = 8
_M32 = 0xFFFF_FFFF


class PaddedInput:
    """Document bytes followed by at least ``PADDING`` zero bytes.

    ``length`` is the number of meaningful bytes; any read up to 64 bytes past
    it sees zeros.
    """

    __slots__ = ("data", "length")

    def __init__(self, source: bytes | bytearray | memoryview | PaddedInput, length: int | None = None):
        if isinstance(source, PaddedInput):
            self.data, self.length = source.data, source.length
            return
        source = bytes(source)
        if length is None:
            self.data = source + bytes(PADDING)
            self.length = len(source)
        else:
            if len(source) < length + PADDING or any(source[length : length + PADDING]):
                raise ValueError("pre-padded buffer needs PADDING zero bytes after length")
            self.data = source
            self.length = length

    def __len__(self) -> int:
        return self.length

    def raw(self) -> bytes:
        return self.data[: self.length]


def check_capacity(length: int) -> None:
    if length > MAX_DOCUMENT_SIZE:
        raise ParseError(ErrorCode.CAPACITY, None, f"{length} bytes exceeds {MAX_DOCUMENT_SIZE}")


def _tz(s: int) -> int:
    return (s & -s).bit_length() - 1 if s else 64


def extract_indexes(mask: int, base: int, out: array, end: int) -> int:
    """Append base + position of every set bit of ``mask`` at ``out[end:]``.

    Decodes eight positions per round without looking at how many bits are
    left; entries past the popcount are garbage that the next call
    overwrites. ``out`` must have room for popcount + 8 entries past ``end``.
    Returns the new logical end.
    """
    new_end = end + mask.bit_count()
    s = mask
    b = end
    while s:
        for _ in range(8):
            out[b] = (base + _tz(s)) & _M32
            b += 1
            s &= s - 1
    return new_end


def extract_indexes_naive(mask: int, base: int, out: array, end: int) -> int:
    s = mask
    while s:
        out[end] = base + _tz(s)
        end += 1
        s &= s - 1
    return end


def build_structural_index(
    source: bytes | PaddedInput,
    *,
    clmul: bool = True,
    naive_extract: bool = False,
    naive_classify: bool = False,
) -> array:
    """Structural and pseudo-structural offsets of ``source`` as ``array('I')``.

    Raises :class:`Utf8Error` when the input is not valid UTF-8.
    """
    padded = PaddedInput(source)
    n = padded.length
    check_capacity(n)
    data = padded.data
    out = array("I", bytes(4 * (n + 1 + EXTRACT_SLACK)))
    extract = extract_indexes_naive if naive_extract else extract_indexes
    carry = ScanCarry()
    utf8 = Utf8State()
    end = 0
    for start in range(0, n, 64):
        block = data[start : start + 64]
        if block.isascii():
            utf8.check_ascii_block()
        else:
            utf8.check_block(block)
        masks, carry = scan_block(block, carry, clmul=clmul, naive_classify=naive_classify)
        final = masks.final_structural
        if n - start < 64:
            final &= (1 << (n - start)) - 1
        end = extract(final, start, out, end)
    if not utf8.finish():
        raise Utf8Error(first_invalid_offset(padded.raw()))
    del out[end:]
    return out
