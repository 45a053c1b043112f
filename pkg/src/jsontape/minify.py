"""Whitespace removal outside strings, driven by the stage-1 masks."""

from __future__ import annotations

from dataclasses import dataclass

from .bits import ScanCarry, scan_block
from .indexer import PaddedInput


def minify_python(source: bytes | PaddedInput) -> bytes:
    """Drop every whitespace byte that is not inside a string. Does not validate."""
    padded = PaddedInput(source)
    data, n = padded.data, padded.length
    out = bytearray()
    carry = ScanCarry()
    for start in range(0, n, 64):
        block = data[start : start + 64]
        masks, carry = scan_block(block, carry)
        drop = masks.whitespace & ~masks.in_string
        if n - start < 64:
            block = block[: n - start]
        if not drop:
            out += block
            continue
        # keep runs between dropped bytes
        pos = 0
        while drop:
            low = drop & -drop
            i = low.bit_length() - 1
            out += block[pos:i]
            pos = i + 1
            drop ^= low
        out += block[pos:]
    return bytes(out)


@dataclass(frozen=True)
class MinifyResult:
    data: bytes
    original_size: int

    @property
    def minified_size(self) -> int:
        return len(self.data)

    @property
    def ratio(self) -> float:
        """Minified size over original size (1.0 when nothing was removed)."""
        return self.minified_size / self.original_size if self.original_size else 1.0


def minify(data, *, backend: str | None = None) -> MinifyResult:
    """Validate ``data`` and return it without whitespace outside strings.

    Raises :class:`~jsontape.errors.ParseError` if the input is not valid JSON.
    """
    from . import _padded, get_backend

    padded = _padded(data)
    impl = get_backend(backend)
    impl.parse(padded)
    return MinifyResult(impl.minify(padded), padded.length)
