"""Mutation fuzzing of the parser against the reference oracle."""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .errors import ParseError
from .oracle import OracleObject, OracleVerdict, canonical, oracle_parse

# bytes that tend to reach interesting grammar states
_INTERESTING = b'"\\{}[],: \t\n-+.0123456789eEtrufalsn/bu\x00\x1f\x7f\x80\xbf\xc0\xc2\xe0\xed\xef\xf0\xf4\xf5\xff'
_TOKENS = (
    b'"', b"\\", b'\\"', b"\\u", b"\\uD834", b"\\uDD1E", b"{", b"}", b"[", b"]", b",", b":",
    b"true", b"false", b"null", b"-0", b"1e309", b"9223372036854775808", b"0e+", b"1.", b".5",
    b"\xf0\x9f\x99\x82", b"\xed\xa0\x80", b"\xc0\xaf", b"[" * 40, b"]" * 40,
)

MUTATIONS = ("flip", "replace", "insert", "delete", "truncate", "splice", "token", "duplicate")


def mutate(data: bytes, rng: random.Random, corpus: list[bytes] | None = None, kind: str | None = None) -> bytes:
    """Apply one mutation. ``kind`` picks it; otherwise chosen at random."""
    kind = kind or rng.choice(MUTATIONS)
    buf = bytearray(data)
    n = len(buf)
    if kind == "flip" and n:
        buf[rng.randrange(n)] ^= 1 << rng.randrange(8)
    elif kind == "replace" and n:
        buf[rng.randrange(n)] = rng.choice(_INTERESTING)
    elif kind == "insert":
        buf.insert(rng.randrange(n + 1), rng.choice(_INTERESTING))
    elif kind == "delete" and n:
        del buf[rng.randrange(n)]
    elif kind == "truncate" and n:
        del buf[rng.randrange(n) :]
    elif kind == "splice" and corpus:
        other = rng.choice(corpus)
        if other:
            a, b = sorted(rng.randrange(len(other) + 1) for _ in range(2))
            at = rng.randrange(n + 1)
            buf[at:at] = other[a:b]
    elif kind == "token":
        at = rng.randrange(n + 1)
        buf[at:at] = rng.choice(_TOKENS)
    elif kind == "duplicate" and n:
        a, b = sorted(rng.randrange(n + 1) for _ in range(2))
        buf[b:b] = buf[a:b]
    return bytes(buf)


@dataclass
class Divergence:
    iteration: int
    data: bytes
    main: str
    oracle: str
    reproducer: Path | None = None

    def describe(self) -> str:
        where = f" ({self.reproducer})" if self.reproducer else ""
        return f"iteration {self.iteration}: parser {self.main}, oracle {self.oracle}{where}"


@dataclass
class FuzzReport:
    iterations: int = 0
    both_accept: int = 0
    both_reject: int = 0
    divergences: list[Divergence] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.divergences

    def summary(self) -> str:
        return (
            f"{self.iterations} inputs: {self.both_accept} accepted by both, "
            f"{self.both_reject} rejected by both, {len(self.divergences)} divergences"
        )


def _main_verdict(data: bytes, backend: str | None):
    from . import parse

    try:
        doc = parse(data, backend=backend)
    except ParseError as exc:
        return False, None, str(exc)
    return True, doc.to_python(OracleObject), "accepted"


def compare(data: bytes, *, backend: str | None = None, oracle: Callable[[bytes], OracleVerdict] = oracle_parse):
    """Run both sides on ``data``.

    Returns ``(agree, accepted, parser_text, oracle_text)``. When both
    accept, the value trees must match as well for ``agree`` to hold.
    """
    accepted, value, text = _main_verdict(data, backend)
    verdict = oracle(data)
    otext = "accepted" if verdict.accepted else f"rejected ({verdict.reason})"
    if accepted != verdict.accepted:
        return False, accepted, text, otext
    if accepted and canonical(value) != canonical(verdict.value):
        return False, accepted, "accepted with a different value tree", otext
    return True, accepted, text, otext


def load_corpus(path: str | Path) -> list[bytes]:
    """Read every regular file of a directory (or one file) as a seed."""
    path = Path(path)
    files = sorted(p for p in path.iterdir() if p.is_file()) if path.is_dir() else [path]
    return [p.read_bytes() for p in files]


def run_fuzz(
    corpus: list[bytes],
    iterations: int,
    *,
    seed: int = 0,
    backend: str | None = None,
    oracle: Callable[[bytes], OracleVerdict] = oracle_parse,
    out_dir: str | Path | None = None,
    max_mutations: int = 3,
    stop_after: int | None = 20,
) -> FuzzReport:
    """Mutate seeds ``iterations`` times and compare every result.

    Each divergent input is written to ``out_dir`` (when given) under a
    content-hash name so it can be replayed with ``jsontool validate --oracle``.
    """
    if not corpus:
        raise ValueError("empty seed corpus")
    rng = random.Random(seed)
    report = FuzzReport()
    out = Path(out_dir) if out_dir is not None else None
    for i in range(iterations):
        data = rng.choice(corpus)
        for _ in range(rng.randint(1, max_mutations)):
            data = mutate(data, rng, corpus)
        report.iterations += 1
        agree, accepted, text, otext = compare(data, backend=backend, oracle=oracle)
        if agree:
            if accepted:
                report.both_accept += 1
            else:
                report.both_reject += 1
            continue
        div = Divergence(i, data, text, otext)
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
            div.reproducer = out / f"divergence-{hashlib.sha1(data).hexdigest()[:12]}.json"
            div.reproducer.write_bytes(data)
        report.divergences.append(div)
        if stop_after is not None and len(report.divergences) >= stop_after:
            break
    return report


def inverted_oracle(data: bytes) -> OracleVerdict:
    """A deliberately wrong oracle that flips every verdict; used to prove the harness notices."""
    verdict = oracle_parse(data)
    return OracleVerdict(not verdict.accepted, None if verdict.accepted else verdict.value, "inverted")
