"""Corpus statistics computed from the tape and the structural index."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .tape import ARRAY_OPEN, DOUBLE, FALSE, INT64, NULL, OBJECT_OPEN, STRING, TRUE, ParsedDocument

_HIGH_BYTES = bytes(range(0x80, 0x100))
STRING_CONVENTION = "strings counts every string node, object keys included"


@dataclass(frozen=True)
class CorpusStats:
    integer: int = 0
    float: int = 0
    string: int = 0
    non_ascii: int = 0
    object: int = 0
    array: int = 0
    null: int = 0
    true: int = 0
    false: int = 0
    structural: int = 0  # S: structural + pseudo-structural bytes
    bytes: int = 0  # B

    @property
    def bytes_per_structural(self) -> float:
        return self.bytes / self.structural if self.structural else 0.0

    def as_dict(self) -> dict:
        d = asdict(self)
        d["bytes_per_structural"] = self.bytes_per_structural
        return d

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)] + ["bytes_per_structural"]


_TAG_FIELDS = {
    INT64: "integer",
    DOUBLE: "float",
    STRING: "string",
    OBJECT_OPEN: "object",
    ARRAY_OPEN: "array",
    NULL: "null",
    TRUE: "true",
    FALSE: "false",
}


def tape_counts(doc: ParsedDocument) -> dict[str, int]:
    counts = dict.fromkeys(_TAG_FIELDS.values(), 0)
    tape = doc.tape
    i, end = 1, len(tape) - 1
    while i < end:
        tag = tape[i] >> 56
        name = _TAG_FIELDS.get(tag)
        if name:
            counts[name] += 1
        i += 2 if tag in (INT64, DOUBLE) else 1
    return counts


def corpus_stats(data: bytes, *, backend: str | None = None) -> CorpusStats:
    """Parse ``data`` and count its nodes, non-ASCII bytes and structurals."""
    from . import build_structural_index, parse

    doc = parse(data, backend=backend)
    index = build_structural_index(data, backend=backend)
    ascii_bytes = len(data.translate(None, _HIGH_BYTES))
    return CorpusStats(
        **tape_counts(doc),
        non_ascii=len(data) - ascii_bytes,
        structural=len(index),
        bytes=len(data),
    )
