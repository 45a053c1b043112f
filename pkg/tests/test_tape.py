import json
import random
import re

import pytest

import jsontape
from jsontape.errors import ErrorCode
from jsontape.oracle import oracle_parse
from jsontape.tape import (
    ARRAY_CLOSE,
    ARRAY_OPEN,
    DOUBLE,
    INT64,
    MAX_DEPTH,
    OBJECT_CLOSE,
    OBJECT_OPEN,
    PAYLOAD_MASK,
    ROOT,
    load_tape_dump,
    word,
)
from conftest import SAMPLE

SAMPLE_TAPE = """\
0  : r	// pointing to 37 (right after last node)
1  : {	// pointing to next tape location 37 (first node after the scope)
2  : string "Width"
3  : integer 800
5  : string "Height"
6  : integer 600
8  : string "Title"
9  : string "View from my room"
10 : string "Url"
11 : string "http://ex.com/img.png"
12 : string "Private"
13 : false
14 : string "Thumbnail"
15 : {	// pointing to next tape location 25 (first node after the scope)
16 : string "Url"
17 : string "http://ex.com/th.png"
18 : string "Height"
19 : integer 125
21 : string "Width"
22 : integer 100
24 : }	// pointing to previous tape location 15 (start of the scope)
25 : string "array"
26 : [	// pointing to next tape location 34 (first node after the scope)
27 : integer 116
29 : integer 943
31 : integer 234
33 : ]	// pointing to previous tape location 26 (start of the scope)
34 : string "Owner"
35 : null
36 : }	// pointing to previous tape location 1 (start of the scope)
37 : r	// pointing to 0 (start root)
"""


def squash(text):
    return [re.sub(r"\s+", " ", line).strip() for line in text.strip().splitlines()]


def test_sample_tape_words(backend):
    doc = jsontape.parse(SAMPLE, backend=backend)
    t = doc.tape
    assert len(t) == 38
    assert t[0] == word(ROOT, 37)
    assert t[1] == word(OBJECT_OPEN, 37)
    assert t[15] == word(OBJECT_OPEN, 25)
    assert t[24] == word(OBJECT_CLOSE, 15)
    assert t[26] == word(ARRAY_OPEN, 34)
    assert t[33] == word(ARRAY_CLOSE, 26)
    assert t[36] == word(OBJECT_CLOSE, 1)
    assert t[37] == word(ROOT, 0)
    ints = {i: t[i + 1] for i in range(len(t) - 1) if t[i] >> 56 == INT64}
    assert ints == {3: 800, 6: 600, 19: 125, 22: 100, 27: 116, 29: 943, 31: 234}
    assert doc.string(2) == "Width"
    assert doc.source_length == len(SAMPLE)


def test_sample_dump(backend):
    assert squash(jsontape.parse(SAMPLE, backend=backend).dump()) == squash(SAMPLE_TAPE)


def test_empty_array(backend):
    t = jsontape.parse(b"[]", backend=backend).tape
    assert list(t) == [word(ROOT, 3), word(ARRAY_OPEN, 3), word(ARRAY_CLOSE, 1), word(ROOT, 0)]


def test_null_root_dump():
    lines = jsontape.parse(b"null").dump().splitlines()
    assert [line.split(" : ")[1].split("\t")[0] for line in lines] == ["r", "null", "r"]


@pytest.mark.parametrize(
    "text, code",
    [
        (b'{"a":1,}', ErrorCode.TAPE_ERROR),
        (b"[12 a]", ErrorCode.TAPE_ERROR),
        (b"[1,]", ErrorCode.TAPE_ERROR),
        (b"[1 2]", ErrorCode.TAPE_ERROR),
        (b'{"a" 1}', ErrorCode.TAPE_ERROR),
        (b"{1:2}", ErrorCode.TAPE_ERROR),
        (b"[}", ErrorCode.TAPE_ERROR),
        (b"[", ErrorCode.TAPE_ERROR),
        (b"]", ErrorCode.TAPE_ERROR),
        (b"[] []", ErrorCode.TAPE_ERROR),
        (b"tru", ErrorCode.TAPE_ERROR),
        (b"truex", ErrorCode.TAPE_ERROR),
        (b"nul", ErrorCode.TAPE_ERROR),
        (b"[0e+]", ErrorCode.NUMBER_ERROR),
        (b'["\\q"]', ErrorCode.STRING_ERROR),
        (b"", ErrorCode.EMPTY),
        (b"  \n ", ErrorCode.EMPTY),
    ],
)
def test_rejections(backend, text, code):
    with pytest.raises(jsontape.ParseError) as err:
        jsontape.parse(text, backend=backend)
    assert err.value.code is code
    assert not oracle_parse(text).accepted


@pytest.mark.parametrize("text, value", [(b"true", True), (b'"a"', "a"), (b"17", 17), (b" -2.5 ", -2.5), (b"null", None)])
def test_root_scalars(backend, text, value):
    assert jsontape.loads(text, backend=backend) == value


def test_duplicate_keys_preserved(backend):
    doc = jsontape.parse(b'{"a":1,"a":2}', backend=backend)
    assert [(k, v.value()) for k, v in doc.root().items()] == [("a", 1), ("a", 2)]


def test_depth_limit(backend):
    ok = b"[" * MAX_DEPTH + b"]" * MAX_DEPTH
    assert jsontape.is_valid(ok, backend=backend)
    deep = b"[" * (MAX_DEPTH + 1) + b"]" * (MAX_DEPTH + 1)
    with pytest.raises(jsontape.ParseError) as err:
        jsontape.parse(deep, backend=backend)
    assert err.value.code is ErrorCode.DEPTH_ERROR
    assert oracle_parse(ok).accepted and not oracle_parse(deep).accepted


def test_string_buffer_has_length_prefix(backend):
    doc = jsontape.parse(b'["a\\u0000b"]', backend=backend)
    off = doc.payload(2)
    assert doc.strings[off : off + 4] == (3).to_bytes(4, "little")
    assert doc.strings[off + 4 : off + 7] == b"a\x00b"


def test_determinism(backend, small_corpus):
    for data in small_corpus.values():
        assert jsontape.parse(data, backend=backend) == jsontape.parse(data, backend=backend)


def test_scope_pointers_on_corpus(backend, small_corpus):
    for data in small_corpus.values():
        doc = jsontape.parse(data, backend=backend)
        # walk word by word, skipping raw number words
        i = 1
        while i < len(doc.tape) - 1:
            tag = doc.tag(i)
            if tag in (ARRAY_OPEN, OBJECT_OPEN):
                end = doc.payload(i)
                assert doc.tag(end - 1) in (ARRAY_CLOSE, OBJECT_CLOSE)
                assert doc.payload(end - 1) == i
            i += 2 if tag in (INT64, DOUBLE) else 1


def test_dump_round_trip(backend, small_corpus):
    for data in small_corpus.values():
        doc = jsontape.parse(data, backend=backend)
        assert load_tape_dump(doc.dump()) == json.loads(data)


def test_load_tape_dump_detects_bad_scope():
    text = jsontape.parse(b"[[1]]").dump().replace("previous tape location 2", "previous tape location 1")
    with pytest.raises(ValueError):
        load_tape_dump(text)


def test_backends_produce_identical_tapes(small_corpus):
    for data in small_corpus.values():
        docs = [jsontape.parse(data, backend=b) for b in jsontape.available_backends()]
        assert all(d == docs[0] for d in docs)


def test_verdicts_match_oracle_on_mutations(backend):
    rng = random.Random(10)
    seeds = [SAMPLE, b'{"a":[1,2.5e3,"x\\n"],"b":{"c":null}}', b'[true,false,-0,"\\ud834\\udd1e"]']
    for _ in range(300 if backend == "python" else 3000):
        data = bytearray(rng.choice(seeds))
        for _ in range(rng.randint(1, 3)):
            op = rng.random()
            i = rng.randrange(len(data) + 1)
            if op < 0.4 and i < len(data):
                data[i] = rng.choice(b'"\\{}[],: 0123456789.eE-+tfnul\x00\x7f\xc3')
            elif op < 0.7:
                data.insert(i, rng.choice(b'"\\{}[],:0-e'))
            elif i < len(data):
                del data[i]
        data = bytes(data)
        assert jsontape.is_valid(data, backend=backend) == oracle_parse(data).accepted, data


def test_dump_round_trip_with_unicode_line_breaks():
    text = json.dumps({"\x85": ["a b", "\x1c"]}, ensure_ascii=False).encode()
    assert load_tape_dump(jsontape.parse(text).dump()) == json.loads(text)
