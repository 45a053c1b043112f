import random

import pytest

import jsontape
from jsontape import Missing, Scalar, distinct_values
from jsontape.document import root
from jsontape.generate import PLANTED_PATH, generate
from jsontape.oracle import OracleObject, canonical, oracle_parse
from conftest import SAMPLE


@pytest.fixture
def sample(backend):
    return jsontape.parse(SAMPLE, backend=backend)


def test_root(sample):
    node = root(sample)
    assert node.index == 1 and node.kind == "object"
    assert root(jsontape.parse(b"null")).kind == "null"
    assert root(jsontape.parse(b"[]")).tag == ord("[")


def test_next_sibling_skips_containers(sample):
    thumb = sample.root().get("Thumbnail")
    assert thumb.index == 15
    after = thumb.next_sibling()
    assert after.index == 25 and after.value() == "array"


def test_last_element_has_no_sibling(sample):
    arr = sample.root().get("array")
    last = arr.at(2)
    assert last.value() == 234
    assert last.next_sibling() is None
    assert sample.root().get("Owner").next_sibling() is None


def test_get_and_at(sample):
    r = sample.root()
    assert r.get("Height").value() == 600
    assert r.get("array").at(1).value() == 943
    assert r.get("Thumbnail").get("Width").value() == 100


def test_missing_carries_reason(sample):
    r = sample.root()
    m = r.get("nope")
    assert not m and isinstance(m, Missing) and "nope" in m.reason
    assert not r.at(0) and "not an array" in r.at(0).reason
    assert not r.get("array").at(3)
    assert not r.get("array").at(-1)
    assert not r.get("Width").get("x")


def test_value_of_container_raises(sample):
    with pytest.raises(TypeError):
        sample.root().value()


def test_empty_containers():
    doc = jsontape.parse(b'{"a":[],"b":{}}')
    assert doc.root().get("a").first_child() is None
    assert list(doc.root().get("b").items()) == []


def test_distinct_values_examples(sample):
    assert distinct_values(sample, "Thumbnail.Width") == {Scalar.of(100)}
    assert distinct_values(sample, "Width") == {Scalar.of(800), Scalar.of(100)}
    assert distinct_values(jsontape.parse(b"{}"), "a") == set()
    assert distinct_values(jsontape.parse(b"7"), "a") == set()


def test_scalar_identity():
    assert Scalar.of(1) != Scalar.of(1.0)
    assert Scalar.of(0.0) != Scalar.of(-0.0)
    assert Scalar.of(True) != Scalar.of(1)
    assert Scalar.of("a") == Scalar.of("a")
    assert Scalar.of(2.5).value == 2.5
    assert Scalar.of("x\n").to_json() == '"x\\n"'


def test_planted_values():
    gen = generate("random-mixed", 60, seed=3)
    doc = jsontape.parse(gen.data)
    assert {s.value for s in distinct_values(doc, PLANTED_PATH)} == gen.planted


def naive_distinct(value, keys):
    depth = len(keys)
    found = set()

    def walk(v, prefixes):
        if isinstance(v, OracleObject):
            for k, child in v:
                m = frozenset(p + 1 for p in prefixes | {0} if keys[p] == k)
                if isinstance(child, OracleObject):
                    walk(child, m - {depth})
                elif isinstance(child, list):
                    walk(child, frozenset())
                elif depth in m:
                    found.add(canonical(child))
        elif isinstance(v, list):
            for child in v:
                walk(child, frozenset())

    walk(value, frozenset())
    return found


def random_doc(rng, depth=0):
    r = rng.random()
    if depth > 4 or r < 0.3:
        return rng.choice([1, 2, 2.0, -0.0, "x", "y", True, None, False])
    if r < 0.6:
        return [random_doc(rng, depth + 1) for _ in range(rng.randint(0, 4))]
    return OracleObject((rng.choice("abc"), random_doc(rng, depth + 1)) for _ in range(rng.randint(0, 4)))


def dumps(v):
    import json

    if isinstance(v, OracleObject):
        return "{" + ",".join(f"{json.dumps(k)}:{dumps(x)}" for k, x in v) + "}"
    if isinstance(v, list):
        return "[" + ",".join(dumps(x) for x in v) + "]"
    return json.dumps(v)


def test_distinct_values_matches_tree_walk(backend):
    rng = random.Random(14)
    for _ in range(150):
        value = random_doc(rng)
        text = dumps(value).encode()
        doc = jsontape.parse(text, backend=backend)
        for path in ("a", "a.b", "b.a", "a.a", "c.b.a"):
            got = {canonical(s.value) for s in distinct_values(doc, path)}
            assert got == naive_distinct(oracle_parse(text).value, path.split(".")), (text, path)


def count_recursive(node, counts):
    counts[node.kind] = counts.get(node.kind, 0) + 1
    if node.is_container():
        for child in node.children():
            count_recursive(child, counts)
    return counts


def test_skip_traversal_matches_recursive(backend):
    rng = random.Random(15)
    for _ in range(100):
        value = random_doc(rng)
        doc = jsontape.parse(dumps(value).encode(), backend=backend)
        # flat scan over the tape using skip() on scalars only
        flat = {}
        i = 1
        while i < len(doc.tape) - 1:
            node = jsontape.NodeRef(doc, i)
            if node.tag in (ord("]"), ord("}")):
                i += 1
                continue
            flat[node.kind] = flat.get(node.kind, 0) + 1
            i = i + 1 if node.is_container() else node.skip()
        assert flat == count_recursive(doc.root(), {})
        assert canonical(doc.to_python(OracleObject)) == canonical(oracle_parse(dumps(value).encode()).value)
