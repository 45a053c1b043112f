"""Number validation and conversion for stage 2."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ErrorCode, ParseError

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1
MAX_SAFE_MANTISSA = 2**53
MAX_INT_DIGITS = 19

# exact binary64 powers of ten usable by the fast path
POWERS_OF_TEN = tuple(float(10**k) for k in range(23))

_DIGITS = frozenset(b"0123456789")
TERMINATORS = frozenset(b",:[]{} \t\n\r")


@dataclass(frozen=True)
class NumberValue:
    kind: str  # "integer" or "float"
    value: int | float


def is_eight_digits(chunk: bytes) -> bool:
    """True iff the first 8 bytes are all ASCII digits (single word-level test)."""
    val = int.from_bytes(chunk[:8], "little")
    return (
        (val & 0xF0F0F0F0F0F0F0F0) | (((val + 0x0606060606060606) & 0xF0F0F0F0F0F0F0F0) >> 4)
    ) == 0x3333333333333333


def parse_eight_digits(chunk: bytes) -> int:
    """Value of eight ASCII digits by pairwise multiply-add rounds.

    Lanes: subtract '0'; combine neighbours with weights (10, 1), then
    (100, 1); pack to 16 bits; finally (10000, 1).
    """
    d = [b - 0x30 for b in chunk[:8]]
    pairs = [d[0] * 10 + d[1], d[2] * 10 + d[3], d[4] * 10 + d[5], d[6] * 10 + d[7]]
    quads = [pairs[0] * 100 + pairs[1], pairs[2] * 100 + pairs[3]]
    packed = [min(q, 0xFFFF) for q in quads]
    return packed[0] * 10000 + packed[1]


def _fail(offset: int, detail: str) -> ParseError:
    return ParseError(ErrorCode.NUMBER_ERROR, offset, detail)


def parse_number(data: bytes, offset: int, length: int | None = None) -> tuple[int | float, int]:
    """Parse the number starting at ``data[offset]``.

    ``data`` must carry zero padding past ``length`` (the logical document
    length, default ``len(data)``). Returns the value (``int`` for integers,
    ``float`` once a fraction or exponent appears) and the offset just past
    the number. The byte after the number must be whitespace, a structural
    character, or the end of the document.
    """
    if length is None:
        length = len(data)
        data = bytes(data) + bytes(16)
    i = offset
    negative = data[i] == 0x2D
    if negative:
        i += 1
    first = data[i]
    if first == 0x30:
        i += 1
        if data[i] in _DIGITS:
            raise _fail(offset, "leading zero")
    elif 0x31 <= first <= 0x39:
        i += 1
        while data[i] in _DIGITS:
            i += 1
    else:
        raise _fail(offset, "expected digit")
    int_end = i
    digit_count = int_end - offset - negative
    # past 19 digits the mantissa is never used: the slow path reparses the text
    mantissa = int(data[offset + negative : int_end]) if digit_count <= MAX_INT_DIGITS else 0
    is_float = False
    exponent = 0

    if data[i] == 0x2E:
        is_float = True
        i += 1
        if data[i] not in _DIGITS:
            raise _fail(offset, "expected digit after decimal point")
        frac_start = i
        while is_eight_digits(data[i : i + 8]):
            if digit_count + i - frac_start <= MAX_INT_DIGITS:
                mantissa = mantissa * 100000000 + parse_eight_digits(data[i : i + 8])
            i += 8
        while data[i] in _DIGITS:
            if digit_count + i - frac_start <= MAX_INT_DIGITS:
                mantissa = mantissa * 10 + (data[i] - 0x30)
            i += 1
        digit_count += i - frac_start
        exponent = -(i - frac_start)

    if data[i] in (0x65, 0x45):
        is_float = True
        i += 1
        exp_negative = False
        if data[i] in (0x2B, 0x2D):
            exp_negative = data[i] == 0x2D
            i += 1
        exp_start = i
        while data[i] in _DIGITS:
            i += 1
        if i == exp_start:
            raise _fail(offset, "expected exponent digits")
        exp_text = data[exp_start:i].lstrip(b"0")
        if len(exp_text) > 18:
            exp_value = 10**18  # far outside any usable range
        else:
            exp_value = int(exp_text or b"0")
        exponent += -exp_value if exp_negative else exp_value

    if i < length and data[i] not in TERMINATORS:
        raise _fail(offset, "invalid character after number")

    if not is_float:
        if digit_count > MAX_INT_DIGITS:
            raise _fail(offset, "integer out of range")
        value = -mantissa if negative else mantissa
        if not INT64_MIN <= value <= INT64_MAX:
            raise _fail(offset, "integer out of range")
        return value, i

    if digit_count <= MAX_INT_DIGITS and mantissa <= MAX_SAFE_MANTISSA and -22 <= exponent <= 22:
        # both operands exact, so one IEEE operation rounds correctly
        if exponent >= 0:
            result = mantissa * POWERS_OF_TEN[exponent]
        else:
            result = mantissa / POWERS_OF_TEN[-exponent]
    else:
        result = float(data[offset + negative : i])
    if math.isinf(result):
        raise _fail(offset, "number out of binary64 range")
    return (-result if negative else result), i


def parse_number_value(text: bytes | str) -> NumberValue:
    """Convenience wrapper: parse a complete number token."""
    raw = text.encode() if isinstance(text, str) else bytes(text)
    if not raw:
        raise _fail(0, "empty")
    value, end = parse_number(raw + bytes(16), 0, len(raw))
    if end != len(raw):
        raise _fail(end, "trailing characters")
    return NumberValue("float" if isinstance(value, float) else "integer", value)
