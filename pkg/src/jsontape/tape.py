"""Stage 2: validate the grammar over the structural index and write the tape.

Tape words carry an 8-bit tag in bits 56-63 and a 56-bit payload:

* ``r`` root markers; word 0 points at the final root word, which points at 0
* ``{``/``[`` point one past their matching closer, ``}``/``]`` point back at the opener
* ``"`` points at a length-prefixed entry of the string buffer
* ``l``/``d`` are followed by a raw int64 / binary64 word
* ``t``, ``f``, ``n`` have no payload
"""

from __future__ import annotations

import json
import struct
from array import array
from dataclasses import dataclass

from .errors import ErrorCode, ParseError
from .indexer import PaddedInput
from .numbers import TERMINATORS, parse_number
from .strings import parse_string, read_string

ROOT = ord("r")
OBJECT_OPEN = ord("{")
OBJECT_CLOSE = ord("}")
ARRAY_OPEN = ord("[")
ARRAY_CLOSE = ord("]")
STRING = ord('"')
INT64 = ord("l")
DOUBLE = ord("d")
TRUE = ord("t")
FALSE = ord("f")
NULL = ord("n")

PAYLOAD_MASK = (1 << 56) - 1
MAX_DEPTH = 1024

_NUMBER_START = frozenset(b"-0123456789")
_ATOMS = {TRUE: b"true", FALSE: b"false", NULL: b"null"}
_I64 = struct.Struct("<q")
_F64 = struct.Struct("<d")


def word(tag: int, payload: int = 0) -> int:
    return (tag << 56) | payload


def int_to_word(value: int) -> int:
    return value & 0xFFFF_FFFF_FFFF_FFFF


def word_to_int(raw: int) -> int:
    return raw - (1 << 64) if raw >> 63 else raw


def float_to_word(value: float) -> int:
    return int.from_bytes(_F64.pack(value), "little")


def word_to_float(raw: int) -> float:
    return _F64.unpack(raw.to_bytes(8, "little"))[0]


@dataclass(frozen=True)
class ParsedDocument:
    """Tape plus string buffer; navigable without the source bytes."""

    tape: array
    strings: bytes
    source_length: int

    def tag(self, i: int) -> int:
        return self.tape[i] >> 56

    def payload(self, i: int) -> int:
        return self.tape[i] & PAYLOAD_MASK

    def string(self, i: int) -> str:
        return read_string(self.strings, self.payload(i)).decode("utf-8")

    def root(self):
        from .document import NodeRef

        return NodeRef(self, 1)

    def to_python(self, object_pairs_hook=None):
        return self.root().to_python(object_pairs_hook)

    def dump(self) -> str:
        return tape_dump(self)

    def __eq__(self, other):
        if not isinstance(other, ParsedDocument):
            return NotImplemented
        return self.tape == other.tape and self.strings == other.strings

    __hash__ = None


def _atom_matches(data: bytes, pos: int, n: int, text: bytes) -> bool:
    end = pos + len(text)
    return data[pos:end] == text and (end >= n or data[end] in TERMINATORS)


def build_tape(source: bytes | PaddedInput, index) -> tuple[array, bytes]:
    """Walk the structural index with an explicit container stack.

    Returns the tape words and the string buffer; raises :class:`ParseError`.
    """
    padded = PaddedInput(source)
    data, n = padded.data, padded.length
    count = len(index)
    if count == 0:
        raise ParseError(ErrorCode.EMPTY, 0, "no JSON value")
    tape = [0]
    strings = bytearray()
    stack: list[int] = []
    i = 0

    def next_token() -> int:
        nonlocal i
        if i >= count:
            raise ParseError(ErrorCode.TAPE_ERROR, n, "unexpected end of document")
        pos = index[i]
        i += 1
        return pos

    def close(tag: int) -> None:
        opener = stack.pop()
        tape[opener] = word(tape[opener] >> 56, len(tape) + 1)
        tape.append(word(tag, opener))

    def open_container(tag: int, pos: int) -> None:
        if len(stack) >= MAX_DEPTH:
            raise ParseError(ErrorCode.DEPTH_ERROR, pos, f"nesting deeper than {MAX_DEPTH}")
        stack.append(len(tape))
        tape.append(word(tag))

    def key() -> None:
        pos = next_token()
        if data[pos] != STRING:
            raise ParseError(ErrorCode.TAPE_ERROR, pos, "expected object key")
        entry, _ = parse_string(data, pos, strings)
        tape.append(word(STRING, entry))
        pos = next_token()
        if data[pos] != 0x3A:
            raise ParseError(ErrorCode.TAPE_ERROR, pos, "expected ':'")

    expect_value = True
    while True:
        if expect_value:
            pos = next_token()
            c = data[pos]
            if c == OBJECT_OPEN:
                open_container(OBJECT_OPEN, pos)
                if i < count and data[index[i]] == OBJECT_CLOSE:
                    i += 1
                    close(OBJECT_CLOSE)
                    expect_value = False
                else:
                    key()
                continue
            if c == ARRAY_OPEN:
                open_container(ARRAY_OPEN, pos)
                if i < count and data[index[i]] == ARRAY_CLOSE:
                    i += 1
                    close(ARRAY_CLOSE)
                    expect_value = False
                continue
            if c == STRING:
                entry, _ = parse_string(data, pos, strings)
                tape.append(word(STRING, entry))
            elif c in _NUMBER_START:
                value, _ = parse_number(data, pos, n)
                if isinstance(value, float):
                    tape.append(word(DOUBLE))
                    tape.append(float_to_word(value))
                else:
                    tape.append(word(INT64))
                    tape.append(int_to_word(value))
            elif c in _ATOMS:
                if not _atom_matches(data, pos, n, _ATOMS[c]):
                    raise ParseError(ErrorCode.TAPE_ERROR, pos, "invalid literal")
                tape.append(word(c))
            else:
                raise ParseError(ErrorCode.TAPE_ERROR, pos, "unexpected character")
            expect_value = False
            continue

        # after a value
        if not stack:
            if i != count:
                raise ParseError(ErrorCode.TAPE_ERROR, index[i], "content after root value")
            break
        pos = next_token()
        c = data[pos]
        in_object = tape[stack[-1]] >> 56 == OBJECT_OPEN
        if c == 0x2C:
            if in_object:
                key()
            expect_value = True
        elif c == (OBJECT_CLOSE if in_object else ARRAY_CLOSE):
            close(c)
        else:
            raise ParseError(ErrorCode.TAPE_ERROR, pos, "expected ',' or closing bracket")

    last = len(tape)
    tape.append(word(ROOT, 0))
    tape[0] = word(ROOT, last)
    return array("Q", tape), bytes(strings)


def tape_dump(doc: ParsedDocument) -> str:
    """One line per tape word, ``index : tag [annotation]``.

    Raw number words are not printed; the line numbering skips them.
    """
    lines = []
    tape = doc.tape
    i = 0
    last = len(tape) - 1
    while i <= last:
        tag = tape[i] >> 56
        payload = tape[i] & PAYLOAD_MASK
        if tag == ROOT:
            if i == 0:
                lines.append(f"{i} : r\t// pointing to {payload} (right after last node)")
            else:
                lines.append(f"{i} : r\t// pointing to {payload} (start root)")
        elif tag in (OBJECT_OPEN, ARRAY_OPEN):
            lines.append(
                f"{i} : {chr(tag)}\t// pointing to next tape location {payload}"
                " (first node after the scope)"
            )
        elif tag in (OBJECT_CLOSE, ARRAY_CLOSE):
            lines.append(
                f"{i} : {chr(tag)}\t// pointing to previous tape location {payload}"
                " (start of the scope)"
            )
        elif tag == STRING:
            text = json.dumps(doc.string(i), ensure_ascii=False)
            lines.append(f"{i} : string {text}")
        elif tag == INT64:
            lines.append(f"{i} : integer {word_to_int(tape[i + 1])}")
            i += 1
        elif tag == DOUBLE:
            lines.append(f"{i} : float {word_to_float(tape[i + 1])!r}")
            i += 1
        elif tag == TRUE:
            lines.append(f"{i} : true")
        elif tag == FALSE:
            lines.append(f"{i} : false")
        elif tag == NULL:
            lines.append(f"{i} : null")
        else:
            raise ValueError(f"corrupt tape word {tape[i]:#x} at {i}")
        i += 1
    return "\n".join(lines) + "\n"


def load_tape_dump(text: str, object_pairs_hook=None):
    """Rebuild the logical value from :func:`tape_dump` output.

    Checks that scope pointers are consistent while doing so.
    """
    make_object = object_pairs_hook or dict
    stack: list[tuple[str, int, list]] = []
    result = None
    done = False
    # only \n separates lines; string values may hold other line breaks
    for line in text.split("\n"):
        if not line.strip():
            continue
        left, _, rest = line.partition(" : ")
        idx = int(left)
        body = rest.split("\t//")[0].strip()
        if body == "r":
            if idx == 0:
                continue
            done = True
            continue
        if body in ("{", "["):
            stack.append((body, idx, []))
            continue
        if body in ("}", "]"):
            opener, start, items = stack.pop()
            target = int(rest.split("location")[1].split()[0])
            if target != start or {"{": "}", "[": "]"}[opener] != body:
                raise ValueError(f"scope mismatch at line {idx}")
            if opener == "{":
                value = make_object(list(zip(items[0::2], items[1::2])))
            else:
                value = items
        elif body.startswith("string "):
            value = json.loads(body[len("string ") :])
        elif body.startswith("integer "):
            value = int(body[len("integer ") :])
        elif body.startswith("float "):
            value = float(body[len("float ") :])
        elif body in ("true", "false", "null"):
            value = {"true": True, "false": False, "null": None}[body]
        else:
            raise ValueError(f"unrecognised tape line: {line!r}")
        if stack:
            stack[-1][2].append(value)
        else:
            result = value
    if stack or not done:
        raise ValueError("truncated tape dump")
    return result
