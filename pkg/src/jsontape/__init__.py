"""Two-stage validating JSON parser.

Stage 1 finds every structural and pseudo-structural byte with branch-free
bitmask arithmetic over 64-byte blocks and validates UTF-8 on the way.
Stage 2 walks that index, checks the grammar, converts numbers and strings,
and writes a flat tape of 64-bit words.

    >>> import jsontape
    >>> doc = jsontape.parse(b'{"a": [1, 2.5, "x"]}')
    >>> doc.root().get("a").at(1).value()
    2.5
"""

from __future__ import annotations

from array import array

from ._backend import DEFAULT, available_backends, get_backend
from .document import Missing, NodeRef, Scalar, distinct_values
from .errors import ErrorCode, ParseError, Utf8Error
from .indexer import MAX_DOCUMENT_SIZE, PADDING, PaddedInput
from .tape import MAX_DEPTH, ParsedDocument, load_tape_dump, tape_dump

BACKEND = DEFAULT.name

__all__ = [
    "BACKEND",
    "ErrorCode",
    "MAX_DEPTH",
    "MAX_DOCUMENT_SIZE",
    "Missing",
    "NodeRef",
    "PADDING",
    "PaddedInput",
    "ParseError",
    "ParsedDocument",
    "Scalar",
    "Utf8Error",
    "available_backends",
    "build_structural_index",
    "build_tape",
    "distinct_values",
    "is_valid",
    "load_tape_dump",
    "loads",
    "parse",
    "tape_dump",
    "validate_utf8",
]


def _padded(data) -> PaddedInput:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return data if isinstance(data, PaddedInput) else PaddedInput(data)


def parse(
    data,
    *,
    backend: str | None = None,
    clmul: bool = True,
    naive_extract: bool = False,
    naive_classify: bool = False,
    timings: list | None = None,
) -> ParsedDocument:
    """Parse a whole document into a :class:`ParsedDocument`.

    The ablation switches select equivalent slower code paths and never
    change the result. Raises :class:`ParseError` on invalid input.
    """
    padded = _padded(data)
    tape_words, strings = get_backend(backend).parse(
        padded,
        clmul=clmul,
        naive_extract=naive_extract,
        naive_classify=naive_classify,
        timings=timings,
    )
    return ParsedDocument(tape_words, strings, padded.length)


def loads(data, *, backend: str | None = None, object_pairs_hook=None):
    """Parse and convert to plain Python objects."""
    return parse(data, backend=backend).to_python(object_pairs_hook)


def is_valid(data, *, backend: str | None = None) -> bool:
    try:
        parse(data, backend=backend)
    except ParseError:
        return False
    return True


def build_structural_index(
    data,
    *,
    backend: str | None = None,
    clmul: bool = True,
    naive_extract: bool = False,
    naive_classify: bool = False,
) -> array:
    return get_backend(backend).structural_index(
        _padded(data), clmul=clmul, naive_extract=naive_extract, naive_classify=naive_classify
    )


def build_tape(data, index, *, backend: str | None = None) -> ParsedDocument:
    padded = _padded(data)
    tape_words, strings = get_backend(backend).build_tape(padded, index)
    return ParsedDocument(tape_words, strings, padded.length)


def validate_utf8(data, *, backend: str | None = None) -> bool:
    return get_backend(backend).validate_utf8(data)
