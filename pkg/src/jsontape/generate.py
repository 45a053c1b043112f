"""Deterministic synthetic corpora.

``size`` means a count of numbers (``numbers``), of records
(``random-mixed``, ``escaped-strings``) or of bytes (``large``). A size of 0
always gives ``[]``.
"""

from __future__ import annotations

import json
import random
import string
from dataclasses import dataclass, field

KINDS = ("numbers", "random-mixed", "escaped-strings", "large")
LARGE_DEFAULT_SIZE = 64 * 1024 * 1024
PLANTED_PATH = "user.id"

# the small image-metadata document used throughout the docs and tests
SAMPLE_DOCUMENT = (
    b'{\n\t"Width": 800,\n\t"Height": 600,\n\t"Title": "View from my room",\n'
    b'\t"Url": "http://ex.com/img.png",\n\t"Private": false,\n\t"Thumbnail": {\n'
    b'\t\t"Url": "http://ex.com/th.png",\n\t\t"Height": 125,\n\t\t"Width": 100\n\t},\n'
    b'\t"array": [\n\t\t116,\n\t\t943,\n\t\t234\n\t],\n\t"Owner": null\n}\n'
)

_WORDS = (
    "lorem ipsum dolor sit amet consectetur adipiscing elit sed do eiusmod tempor "
    "incididunt ut labore et dolore magna aliqua"
).split()
_NON_ASCII = "éüßçøåñ東京大阪日本語한국어Ελληνικάкириллица🙂🚀🎉"


@dataclass
class Generated:
    data: bytes
    kind: str
    size: int
    seed: int
    floats: int = 0
    planted: set = field(default_factory=set)


def _text(rng: random.Random, words: int, non_ascii: bool) -> str:
    parts = [rng.choice(_WORDS) for _ in range(words)]
    if non_ascii:
        for _ in range(rng.randint(1, 3)):
            parts.insert(rng.randrange(len(parts) + 1), "".join(rng.choices(_NON_ASCII, k=rng.randint(1, 4))))
    if rng.random() < 0.3:
        parts.append(rng.choice(['"quoted"', "back\\slash", "tab\there", "new\nline", "/path/"]))
    return " ".join(parts)


def _record(rng: random.Random, n: int, non_ascii: bool, planted: set) -> dict:
    user_id = rng.randrange(1, 5000)
    planted.add(user_id)
    record = {
        "id": rng.randrange(10**15, 10**16),
        "created_at": f"2019-0{rng.randint(1, 9)}-{rng.randint(10, 28)}T12:{rng.randint(10, 59)}:00Z",
        "text": _text(rng, rng.randint(3, 20), non_ascii),
        "user": {
            "id": user_id,
            "name": "".join(rng.choices(string.ascii_letters, k=rng.randint(4, 12))),
            "verified": rng.random() < 0.1,
            "followers": rng.randint(0, 10**6),
            "location": None if rng.random() < 0.5 else _text(rng, 2, non_ascii),
        },
        "score": round(rng.uniform(-1000, 1000), rng.randint(1, 12)),
        "ratio": rng.random(),
        "tags": [rng.choice(_WORDS) for _ in range(rng.randint(0, 4))],
        "coords": [round(rng.uniform(-180, 180), 6), round(rng.uniform(-90, 90), 6)],
        "reply_to": None,
        "flags": {"sensitive": False, "retweeted": rng.random() < 0.5},
        "seq": n,
    }
    if rng.random() < 0.2:
        record["quoted"] = {"user": {"id": -1, "name": "nested"}, "depth": [[1, [2, [3]]]], "e": 1.5e-7}
        planted.add(-1)
    return record


def _float_text(rng: random.Random) -> str:
    choice = rng.random()
    if choice < 0.5:
        value = rng.random()
    elif choice < 0.8:
        value = rng.uniform(-1e6, 1e6)
    else:
        value = rng.random() * 10.0 ** rng.randint(-300, 300)
    text = repr(value)
    return text if ("." in text or "e" in text) else text + ".0"


def _dump(items: list[str], indent: int | None) -> bytes:
    if not items:
        return b"[]"
    if indent is None:
        return ("[" + ",".join(items) + "]").encode("utf-8")
    pad = "\n" + " " * indent
    return ("[" + pad + ("," + pad).join(items) + "\n]").encode("utf-8")


def _record_text(record: dict, indent: int | None, ensure_ascii: bool) -> str:
    text = json.dumps(record, indent=indent, ensure_ascii=ensure_ascii)
    if indent:
        text = text.replace("\n", "\n" + " " * indent)
    return text


def generate(kind: str, size: int, seed: int = 0, *, indent: int | None = None) -> Generated:
    """Build a corpus of the given kind. Same arguments, same bytes."""
    if kind not in KINDS:
        raise ValueError(f"unknown corpus kind {kind!r}; choose from {', '.join(KINDS)}")
    if size < 0:
        raise ValueError("size must be non-negative")
    rng = random.Random(f"{kind}:{seed}")
    out = Generated(b"", kind, size, seed)

    if kind == "numbers":
        items = [_float_text(rng) for _ in range(size)]
        out.floats = size
    elif kind in ("random-mixed", "escaped-strings"):
        escaped = kind == "escaped-strings"
        items = [
            _record_text(_record(rng, n, True, out.planted), indent, escaped) for n in range(size)
        ]
    else:
        items = []
        total = 2
        n = 0
        while total < size:
            text = _record_text(_record(rng, n, rng.random() < 0.3, out.planted), indent, False)
            items.append(text)
            total += len(text.encode("utf-8")) + 1 + (indent + 1 if indent else 0)
            n += 1
    out.data = _dump(items, indent)
    return out


def seed_corpus(seed: int = 0) -> dict[str, bytes]:
    """Small valid documents for fuzzing: the sample plus one of each generated kind."""
    return {
        "sample.json": SAMPLE_DOCUMENT,
        "numbers.json": generate("numbers", 40, seed).data,
        "random-mixed.json": generate("random-mixed", 2, seed).data,
        "random-mixed-indented.json": generate("random-mixed", 1, seed + 1, indent=2).data,
        "escaped-strings.json": generate("escaped-strings", 2, seed).data,
        "atoms.json": b'[true,false,null,-0,0.5e-3,-9223372036854775808,"\\u00e9\\ud834\\udd1e",{},[]]',
    }
