"""Read-only navigation over a parsed tape."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .tape import (
    ARRAY_CLOSE,
    ARRAY_OPEN,
    DOUBLE,
    FALSE,
    INT64,
    NULL,
    OBJECT_CLOSE,
    OBJECT_OPEN,
    PAYLOAD_MASK,
    ROOT,
    STRING,
    TRUE,
    ParsedDocument,
    float_to_word,
    word_to_float,
    word_to_int,
)

_ENDS = (ARRAY_CLOSE, OBJECT_CLOSE, ROOT)
KIND_NAMES = {
    OBJECT_OPEN: "object",
    ARRAY_OPEN: "array",
    STRING: "string",
    INT64: "integer",
    DOUBLE: "float",
    TRUE: "true",
    FALSE: "false",
    NULL: "null",
}


class Missing:
    """Falsy stand-in for an absent node that says why it is absent."""

    __slots__ = ("reason",)

    def __init__(self, reason: str):
        self.reason = reason

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return f"Missing({self.reason!r})"


@dataclass(frozen=True)
class NodeRef:
    doc: ParsedDocument
    index: int

    @property
    def tag(self) -> int:
        return self.doc.tape[self.index] >> 56

    @property
    def kind(self) -> str:
        return KIND_NAMES[self.tag]

    def is_container(self) -> bool:
        return self.tag in (OBJECT_OPEN, ARRAY_OPEN)

    def skip(self) -> int:
        """Tape index just past this node."""
        w = self.doc.tape[self.index]
        tag = w >> 56
        if tag in (OBJECT_OPEN, ARRAY_OPEN):
            return w & PAYLOAD_MASK
        if tag in (INT64, DOUBLE):
            return self.index + 2
        return self.index + 1

    def next_sibling(self) -> NodeRef | None:
        j = self.skip()
        if self.doc.tape[j] >> 56 in _ENDS:
            return None
        return NodeRef(self.doc, j)

    def first_child(self) -> NodeRef | None:
        if not self.is_container():
            return None
        j = self.index + 1
        if self.doc.tape[j] >> 56 in _ENDS:
            return None
        return NodeRef(self.doc, j)

    def children(self) -> Iterator[NodeRef]:
        """Direct children; for objects keys and values alternate."""
        child = self.first_child()
        while child is not None:
            yield child
            child = child.next_sibling()

    def items(self) -> Iterator[tuple[str, NodeRef]]:
        it = self.children()
        for k in it:
            yield self.doc.string(k.index), next(it)

    def get(self, key: str) -> NodeRef | Missing:
        if self.tag != OBJECT_OPEN:
            return Missing(f"not an object ({self.kind})")
        for k, v in self.items():
            if k == key:
                return v
        return Missing(f"no key {key!r}")

    def at(self, i: int) -> NodeRef | Missing:
        if self.tag != ARRAY_OPEN:
            return Missing(f"not an array ({self.kind})")
        if i < 0:
            return Missing("negative index")
        for n, child in enumerate(self.children()):
            if n == i:
                return child
        return Missing(f"index {i} out of range")

    def value(self):
        """Python value of a scalar node."""
        tape = self.doc.tape
        tag = tape[self.index] >> 56
        if tag == STRING:
            return self.doc.string(self.index)
        if tag == INT64:
            return word_to_int(tape[self.index + 1])
        if tag == DOUBLE:
            return word_to_float(tape[self.index + 1])
        if tag == TRUE:
            return True
        if tag == FALSE:
            return False
        if tag == NULL:
            return None
        raise TypeError(f"{self.kind} node has no scalar value")

    def scalar(self) -> Scalar:
        tape = self.doc.tape
        tag = tape[self.index] >> 56
        if tag == DOUBLE:
            return Scalar("float", tape[self.index + 1])
        if tag == INT64:
            return Scalar("integer", word_to_int(tape[self.index + 1]))
        if tag == STRING:
            return Scalar("string", self.doc.string(self.index))
        if tag in (TRUE, FALSE, NULL):
            return Scalar(KIND_NAMES[tag], None)
        raise TypeError(f"{self.kind} node is not a scalar")

    def to_python(self, object_pairs_hook=None):
        """Recursive conversion. Objects become dicts unless a pairs hook is given."""
        tag = self.tag
        if tag == ARRAY_OPEN:
            return [c.to_python(object_pairs_hook) for c in self.children()]
        if tag == OBJECT_OPEN:
            pairs = [(k, v.to_python(object_pairs_hook)) for k, v in self.items()]
            return object_pairs_hook(pairs) if object_pairs_hook else dict(pairs)
        return self.value()


_KIND_ORDER = {"null": 0, "false": 1, "true": 2, "integer": 3, "float": 4, "string": 5}


class Scalar:
    """A scalar compared by kind, then by value bits (floats) or value."""

    __slots__ = ("kind", "raw")

    def __init__(self, kind: str, raw):
        self.kind = kind
        self.raw = raw

    @classmethod
    def of(cls, value) -> Scalar:
        if value is None:
            return cls("null", None)
        if value is True:
            return cls("true", None)
        if value is False:
            return cls("false", None)
        if isinstance(value, int):
            return cls("integer", value)
        if isinstance(value, float):
            return cls("float", float_to_word(value))
        if isinstance(value, str):
            return cls("string", value)
        raise TypeError(f"not a JSON scalar: {value!r}")

    @property
    def value(self):
        if self.kind == "float":
            return word_to_float(self.raw)
        return {"null": None, "true": True, "false": False}.get(self.kind, self.raw)

    def _key(self):
        return (self.kind, self.raw)

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def sort_key(self):
        v = self.value if self.kind in ("integer", "float", "string") else 0
        return (_KIND_ORDER[self.kind], v)

    def to_json(self) -> str:
        import json

        if self.kind == "string":
            return json.dumps(self.raw, ensure_ascii=False)
        if self.kind == "float":
            return repr(self.value)
        if self.kind == "integer":
            return str(self.raw)
        return self.kind

    def __repr__(self) -> str:
        return f"Scalar({self.kind}, {self.to_json()})"


def root(doc: ParsedDocument) -> NodeRef:
    return NodeRef(doc, 1)


def distinct_values(doc: ParsedDocument, path: str) -> set[Scalar]:
    """Distinct scalars found at a dotted key path.

    ``a.b`` matches the value of key ``b`` in any object that is itself the
    value of key ``a``, at any depth. Container values at the path are ignored.
    """
    keys = path.split(".")
    depth = len(keys)
    found: set[Scalar] = set()
    tape = doc.tape
    # each stack entry: (tape index of the next child, end index, object?, progress)
    # progress = set of key-chain prefixes matched by the enclosing object
    start = NodeRef(doc, 1)
    if not start.is_container():
        return found
    stack = [(2, tape[1] & PAYLOAD_MASK, tape[1] >> 56 == OBJECT_OPEN, frozenset())]
    while stack:
        j, end, is_object, progress = stack.pop()
        while j < end - 1:
            if is_object:
                key = doc.string(j)
                j += 1
                matched = frozenset(p + 1 for p in progress | {0} if keys[p] == key)
            else:
                matched = frozenset()
            tag = tape[j] >> 56
            if tag in (OBJECT_OPEN, ARRAY_OPEN):
                after = tape[j] & PAYLOAD_MASK
                inner = matched - {depth} if tag == OBJECT_OPEN else frozenset()
                stack.append((after, end, is_object, progress))
                stack.append((j + 1, after, tag == OBJECT_OPEN, inner))
                break
            if depth in matched:
                found.add(NodeRef(doc, j).scalar())
            j += 2 if tag in (INT64, DOUBLE) else 1
    return found
