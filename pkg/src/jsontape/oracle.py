"""Byte-at-a-time reference parser used for differential testing.

Nothing here imports the stage-1/stage-2 pipeline: the scanner, the UTF-8
automaton, the grammar, string decoding and decimal conversion are all
written out again in the plainest form available.
"""

from __future__ import annotations

import struct
import sys
from dataclasses import dataclass, field
from fractions import Fraction

MAX_DEPTH = 1024
INT_MIN = -(2**63)
INT_MAX = 2**63 - 1

_WS = b" \t\n\r"
_STRUCTURAL = b",:[]{}"
_SIMPLE_ESCAPES = {
    ord('"'): '"',
    ord("\\"): "\\",
    ord("/"): "/",
    ord("b"): "\b",
    ord("f"): "\f",
    ord("n"): "\n",
    ord("r"): "\r",
    ord("t"): "\t",
}
_HEXDIGITS = b"0123456789abcdefABCDEF"
# Significant digits kept before a sticky digit replaces the rest. Any
# binary64 rounding decision is settled within the first 770 or so.
_KEEP_DIGITS = 800


# -- UTF-8 --------------------------------------------------------------------

UTF8_ACCEPT = 0
UTF8_REJECT = 8


def _build_utf8_dfa() -> bytes:
    # states: 0 start, 1/2/3 need that many 80..BF bytes,
    # 4 after E0, 5 after ED, 6 after F0, 7 after F4, 8 dead
    table = bytearray([UTF8_REJECT] * (9 * 256))

    def span(state, lo, hi, target):
        for b in range(lo, hi + 1):
            table[state * 256 + b] = target

    span(0, 0x00, 0x7F, 0)
    span(0, 0xC2, 0xDF, 1)
    span(0, 0xE0, 0xE0, 4)
    span(0, 0xE1, 0xEC, 2)
    span(0, 0xED, 0xED, 5)
    span(0, 0xEE, 0xEF, 2)
    span(0, 0xF0, 0xF0, 6)
    span(0, 0xF1, 0xF3, 3)
    span(0, 0xF4, 0xF4, 7)
    span(1, 0x80, 0xBF, 0)
    span(2, 0x80, 0xBF, 1)
    span(3, 0x80, 0xBF, 2)
    span(4, 0xA0, 0xBF, 1)
    span(5, 0x80, 0x9F, 1)
    span(6, 0x90, 0xBF, 2)
    span(7, 0x80, 0x8F, 2)
    return bytes(table)


UTF8_DFA = _build_utf8_dfa()


def utf8_valid_scalar(data: bytes) -> bool:
    """Table-driven automaton over the well-formed byte sequence table."""
    state = UTF8_ACCEPT
    table = UTF8_DFA
    for b in data:
        state = table[state * 256 + b]
        if state == UTF8_REJECT:
            return False
    return state == UTF8_ACCEPT


# -- stage-1 reference --------------------------------------------------------


def oracle_structural_scan(data: bytes) -> list[int]:
    """Offsets of structural and pseudo-structural bytes, one byte at a time.

    Opening quotes are reported, closing quotes are not. A byte after a
    whitespace byte, a structural byte or any unescaped quote starts a
    pseudo-structural token when it lies outside a string.
    """
    out = []
    in_string = False
    backslashes = 0
    prev_separator = True
    for i, c in enumerate(data):
        escaped = backslashes % 2 == 1
        backslashes = backslashes + 1 if c == 0x5C else 0
        if c == 0x22 and not escaped:
            if not in_string:
                out.append(i)
            in_string = not in_string
            separator = True
        elif in_string:
            separator = c in _WS
        elif c in _STRUCTURAL:
            out.append(i)
            separator = True
        elif c in _WS:
            separator = True
        else:
            if prev_separator:
                out.append(i)
            separator = False
        prev_separator = separator
    return out


# -- values -------------------------------------------------------------------


class OracleObject(list):
    """Object members as an ordered list of ``(key, value)`` pairs."""

    def __repr__(self):
        return "OracleObject(" + list.__repr__(self) + ")"


class _Reject(Exception):
    def __init__(self, pos: int, reason: str):
        super().__init__(reason)
        self.pos = pos
        self.reason = reason


def decimal_to_float(negative: bool, int_digits: str, frac_digits: str, exponent: int) -> float:
    """Correctly rounded binary64 value of ``int_digits.frac_digits e exponent``.

    Raises OverflowError past the largest finite double.
    """
    digits = (int_digits + frac_digits).lstrip("0")
    scale = exponent - len(frac_digits)
    if not digits:
        return -0.0 if negative else 0.0
    trimmed = digits.rstrip("0")
    scale += len(digits) - len(trimmed)
    digits = trimmed
    magnitude = len(digits) + scale  # value lies in [10^(magnitude-1), 10^magnitude)
    if magnitude > 310:
        raise OverflowError("too large")
    if magnitude < -330:
        return -0.0 if negative else 0.0
    if len(digits) > _KEEP_DIGITS:
        # a trailing nonzero digit keeps halfway cases honest
        scale += len(digits) - _KEEP_DIGITS - 1
        digits = digits[:_KEEP_DIGITS] + "1"
    value = Fraction(int(digits)) * Fraction(10) ** scale
    result = value.numerator / value.denominator
    return -result if negative else result


class _Parser:
    def __init__(self, data: bytes):
        self.data = data
        self.n = len(data)
        self.pos = 0

    def peek(self) -> int:
        return self.data[self.pos] if self.pos < self.n else -1

    def skip_ws(self) -> None:
        while self.pos < self.n and self.data[self.pos] in _WS:
            self.pos += 1

    def fail(self, reason: str):
        raise _Reject(self.pos, reason)

    def document(self):
        self.skip_ws()
        if self.pos >= self.n:
            self.fail("empty document")
        value = self.value(0)
        self.skip_ws()
        if self.pos != self.n:
            self.fail("trailing content")
        return value

    def value(self, depth: int):
        c = self.peek()
        if c == 0x7B:
            return self.obj(depth + 1)
        if c == 0x5B:
            return self.arr(depth + 1)
        if c == 0x22:
            return self.string()
        if c == 0x2D or 0x30 <= c <= 0x39:
            return self.number()
        for word, result in ((b"true", True), (b"false", False), (b"null", None)):
            if self.data.startswith(word, self.pos):
                self.pos += len(word)
                return result
        self.fail("unexpected byte")

    def obj(self, depth: int):
        if depth > MAX_DEPTH:
            self.fail("too deep")
        self.pos += 1
        members = OracleObject()
        self.skip_ws()
        if self.peek() == 0x7D:
            self.pos += 1
            return members
        while True:
            self.skip_ws()
            if self.peek() != 0x22:
                self.fail("expected key")
            key = self.string()
            self.skip_ws()
            if self.peek() != 0x3A:
                self.fail("expected colon")
            self.pos += 1
            self.skip_ws()
            members.append((key, self.value(depth)))
            self.skip_ws()
            c = self.peek()
            self.pos += 1
            if c == 0x7D:
                return members
            if c != 0x2C:
                self.pos -= 1
                self.fail("expected comma or }")

    def arr(self, depth: int):
        if depth > MAX_DEPTH:
            self.fail("too deep")
        self.pos += 1
        items = []
        self.skip_ws()
        if self.peek() == 0x5D:
            self.pos += 1
            return items
        while True:
            self.skip_ws()
            items.append(self.value(depth))
            self.skip_ws()
            c = self.peek()
            self.pos += 1
            if c == 0x5D:
                return items
            if c != 0x2C:
                self.pos -= 1
                self.fail("expected comma or ]")

    def hex4(self) -> int:
        chunk = self.data[self.pos : self.pos + 4]
        if len(chunk) != 4 or any(b not in _HEXDIGITS for b in chunk):
            self.fail("bad unicode escape")
        self.pos += 4
        return int(chunk.decode("ascii"), 16)

    def string(self) -> str:
        self.pos += 1
        out = []
        raw = bytearray()
        while True:
            c = self.peek()
            if c == -1:
                self.fail("unterminated string")
            if c < 0x20:
                self.fail("control character in string")
            if c == 0x22:
                self.pos += 1
                break
            if c != 0x5C:
                raw.append(c)
                self.pos += 1
                continue
            out.append(raw.decode("utf-8"))
            raw = bytearray()
            self.pos += 1
            e = self.peek()
            self.pos += 1
            if e in _SIMPLE_ESCAPES:
                out.append(_SIMPLE_ESCAPES[e])
            elif e == 0x75:
                unit = self.hex4()
                if 0xDC00 <= unit <= 0xDFFF:
                    self.fail("unpaired low surrogate")
                if 0xD800 <= unit <= 0xDBFF:
                    if self.data[self.pos : self.pos + 2] != b"\\u":
                        self.fail("unpaired high surrogate")
                    self.pos += 2
                    low = self.hex4()
                    if not 0xDC00 <= low <= 0xDFFF:
                        self.fail("unpaired high surrogate")
                    unit = 0x10000 + (unit - 0xD800) * 0x400 + (low - 0xDC00)
                out.append(chr(unit))
            else:
                self.fail("bad escape")
        out.append(raw.decode("utf-8"))
        return "".join(out)

    def digits(self) -> str:
        start = self.pos
        while 0x30 <= self.peek() <= 0x39:
            self.pos += 1
        return self.data[start : self.pos].decode("ascii")

    def number(self):
        negative = self.peek() == 0x2D
        if negative:
            self.pos += 1
        int_digits = self.digits()
        if not int_digits:
            self.fail("expected digit")
        if len(int_digits) > 1 and int_digits[0] == "0":
            self.fail("leading zero")
        frac_digits = ""
        exponent = None
        if self.peek() == 0x2E:
            self.pos += 1
            frac_digits = self.digits()
            if not frac_digits:
                self.fail("expected fraction digit")
        if self.peek() in (0x45, 0x65):
            self.pos += 1
            sign = 1
            if self.peek() in (0x2B, 0x2D):
                sign = -1 if self.peek() == 0x2D else 1
                self.pos += 1
            exp_digits = self.digits()
            if not exp_digits:
                self.fail("expected exponent digit")
            exp_digits = exp_digits.lstrip("0") or "0"
            # beyond ten digits the exponent only matters through its sign
            exponent = sign * (int(exp_digits) if len(exp_digits) <= 10 else 10**10)
        if exponent is None and not frac_digits:
            if len(int_digits) > 19:
                self.fail("integer out of range")
            value = int(int_digits)
            value = -value if negative else value
            if not INT_MIN <= value <= INT_MAX:
                self.fail("integer out of range")
            return value
        try:
            return decimal_to_float(negative, int_digits, frac_digits, exponent or 0)
        except OverflowError:
            self.fail("number out of range")


@dataclass
class OracleVerdict:
    accepted: bool
    value: object = None
    reason: str = ""
    offset: int | None = None
    positions: list[int] | None = field(default=None, repr=False)


def oracle_parse(data: bytes, *, with_positions: bool = False) -> OracleVerdict:
    """Accept or reject ``data`` under the same policy as the main parser.

    Objects come back as :class:`OracleObject` so duplicate keys and member
    order survive.
    """
    data = bytes(data)
    positions = oracle_structural_scan(data) if with_positions else None
    if not utf8_valid_scalar(data):
        return OracleVerdict(False, reason="invalid UTF-8", positions=positions)
    limit = sys.getrecursionlimit()
    if limit < 4 * MAX_DEPTH:
        sys.setrecursionlimit(4 * MAX_DEPTH)
    try:
        value = _Parser(data).document()
    except _Reject as exc:
        return OracleVerdict(False, reason=exc.reason, offset=exc.pos, positions=positions)
    finally:
        sys.setrecursionlimit(limit)
    return OracleVerdict(True, value, positions=positions)


_DOUBLE = struct.Struct("<d")


def canonical(value):
    """Hashable, type-strict form of a value tree for equality checks.

    Floats compare by bit pattern, so ``-0.0`` differs from ``0.0`` and
    ``1`` differs from ``1.0`` and ``True``.
    """
    if value is None or value is True or value is False:
        return ("atom", value)
    if isinstance(value, float):
        return ("float", _DOUBLE.pack(value))
    if isinstance(value, int):
        return ("int", value)
    if isinstance(value, str):
        return ("str", value)
    if isinstance(value, dict):
        return ("obj", tuple((k, canonical(v)) for k, v in value.items()))
    if isinstance(value, OracleObject):
        return ("obj", tuple((k, canonical(v)) for k, v in value))
    if isinstance(value, list):
        return ("arr", tuple(canonical(v) for v in value))
    raise TypeError(f"unexpected value {value!r}")
