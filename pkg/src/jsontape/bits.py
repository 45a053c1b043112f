"""Stage-1 bitmask kernels over 64-byte blocks.

Every mask is a Python int holding 64 bits; bit ``i`` describes byte ``i`` of
the block (least significant bit first). State that crosses a block boundary
travels in a :class:`ScanCarry`.
"""

from __future__ import annotations

from dataclasses import dataclass

WORD = 0xFFFF_FFFF_FFFF_FFFF
EVEN_BITS = 0x5555_5555_5555_5555
ODD_BITS = 0xAAAA_AAAA_AAAA_AAAA

# Nibble lookup tables: AND of the two lookups gives 1 (comma), 2 (colon),
# 4 (brackets/braces), 8 (tab, lf, cr), 16 (space), 0 otherwise.
LOW_NIBBLE_TABLE = (16, 0, 0, 0, 0, 0, 0, 0, 0, 8, 10, 4, 1, 12, 0, 0)
HIGH_NIBBLE_TABLE = (8, 0, 17, 2, 0, 4, 0, 4, 0, 0, 0, 0, 0, 0, 0, 0)
STRUCTURAL_CLASS = 0b00111
WHITESPACE_CLASS = 0b11000

STRUCTURAL_CHARS = b",:[]{}"
WHITESPACE_CHARS = b" \t\n\r"

_LOW_LOOKUP = bytes(LOW_NIBBLE_TABLE[b & 0xF] for b in range(256))
_HIGH_LOOKUP = bytes(HIGH_NIBBLE_TABLE[b >> 4] for b in range(256))
_LANE_REPEAT = int.from_bytes(b"\x01" * 64, "little")
_NONZERO_TO_DIGIT = bytes([0x30] + [0x31] * 255)


def _eq_table(chars: bytes) -> bytes:
    return bytes(0x31 if b in chars else 0x30 for b in range(256))


_EQ_TABLES = {c: _eq_table(bytes([c])) for c in b'\\"' + STRUCTURAL_CHARS + WHITESPACE_CHARS}
_HIGH_BIT_TABLE = bytes(0x31 if b >= 0x80 else 0x30 for b in range(256))


@dataclass(frozen=True)
class BlockMasks:
    backslash: int
    raw_quote: int
    escaped: int
    unescaped_quote: int
    in_string: int
    structural: int
    whitespace: int
    final_structural: int


@dataclass(frozen=True)
class ScanCarry:
    """Cross-block state. The default is the document-start state."""

    odd_backslash_carry: int = 0
    in_string_carry: int = 0
    prev_is_separator: int = 1


def _digits_to_mask(digits: bytes) -> int:
    # digits[i] is b"0" or b"1" for byte i; int() wants the most significant first
    return int(digits[::-1], 2) if digits else 0


def lanes_to_mask(lanes: bytes) -> int:
    """Compress 8-bit lanes into a bitmask: bit i set iff lane i is nonzero."""
    return _digits_to_mask(lanes.translate(_NONZERO_TO_DIGIT))


def eq_mask(block: bytes, char: int) -> int:
    """Mask of the bytes of ``block`` equal to ``char``."""
    table = _EQ_TABLES.get(char) or _eq_table(bytes([char]))
    return _digits_to_mask(block.translate(table))


def high_bit_mask(block: bytes) -> int:
    return _digits_to_mask(block.translate(_HIGH_BIT_TABLE))


def clmul64(a: int, b: int) -> int:
    """Full 128-bit carry-less product of two 64-bit words."""
    product = 0
    while a:
        low = a & -a
        product ^= b * low  # b << index of the lowest set bit
        a ^= low
    return product


def prefix_xor_clmul(mask: int) -> int:
    """Prefix XOR as the low half of a carry-less multiply by all ones."""
    return clmul64(mask, WORD) & WORD


def prefix_xor_ladder(mask: int) -> int:
    """Prefix XOR by the six-step shift/XOR ladder."""
    mask ^= (mask << 1) & WORD
    mask ^= (mask << 2) & WORD
    mask ^= (mask << 4) & WORD
    mask ^= (mask << 8) & WORD
    mask ^= (mask << 16) & WORD
    mask ^= (mask << 32) & WORD
    return mask


def prefix_xor(mask: int, clmul: bool = True) -> int:
    return prefix_xor_clmul(mask) if clmul else prefix_xor_ladder(mask)


def odd_backslash_ends(backslash: int, carry: int = 0) -> tuple[int, int]:
    """Mark bytes that directly follow an odd-length run of backslashes.

    Runs are split by the parity of their starting offset; adding the start
    bit to the run carries one past its end, and the parity of that end tells
    whether the run length was odd. ``carry`` flags an odd run that ended the
    previous block: it flips the parity of a run starting at byte 0 and can
    escape byte 0 by itself.
    """
    starts = backslash & ~(backslash << 1) & WORD
    even_start_mask = EVEN_BITS ^ carry
    even_starts = starts & even_start_mask
    odd_starts = starts & ~even_start_mask & WORD

    even_carries = (backslash + even_starts) & WORD
    odd_sum = backslash + odd_starts
    carry_out = odd_sum >> 64
    odd_carries = (odd_sum & WORD) | carry

    even_carry_ends = even_carries & ~backslash
    odd_carry_ends = odd_carries & ~backslash
    od = (even_carry_ends & ODD_BITS) | (odd_carry_ends & EVEN_BITS)
    return od & WORD, carry_out


def classify_block(block: bytes) -> tuple[int, int]:
    """Nibble-table classification into (structural, whitespace) masks.

    The two lookups are done for all 64 lanes at once and ANDed as one
    512-bit integer.
    """
    low = int.from_bytes(block.translate(_LOW_LOOKUP), "little")
    high = int.from_bytes(block.translate(_HIGH_LOOKUP), "little")
    lanes = low & high
    n = len(block)
    structural = lanes_to_mask((lanes & (_LANE_REPEAT * STRUCTURAL_CLASS)).to_bytes(n, "little"))
    whitespace = lanes_to_mask((lanes & (_LANE_REPEAT * WHITESPACE_CLASS)).to_bytes(n, "little"))
    return structural, whitespace


def classify_block_naive(block: bytes) -> tuple[int, int]:
    """One comparison per character of each set, ORed together."""
    structural = 0
    for c in STRUCTURAL_CHARS:
        structural |= eq_mask(block, c)
    whitespace = 0
    for c in WHITESPACE_CHARS:
        whitespace |= eq_mask(block, c)
    return structural, whitespace


def string_mask(unescaped_quote: int, carry: int = 0, clmul: bool = True) -> tuple[int, int]:
    """Quoted ranges: opening quote included, closing quote excluded."""
    in_string = prefix_xor(unescaped_quote, clmul) ^ (-carry & WORD)
    return in_string, in_string >> 63


def finalize_structurals(
    structural: int,
    whitespace: int,
    unescaped_quote: int,
    in_string: int,
    prev_is_separator: int = 1,
) -> tuple[int, int]:
    """Structural characters outside strings plus pseudo-structural characters."""
    structural &= ~in_string
    structural |= unescaped_quote
    pred = structural | whitespace
    carry_out = (pred >> 63) & 1
    pseudo = ((pred << 1) & WORD) | prev_is_separator
    pseudo &= ~whitespace & ~in_string
    structural |= pseudo
    structural &= ~(unescaped_quote & ~in_string)
    return structural & WORD, carry_out


def scan_block(
    block: bytes,
    carry: ScanCarry = ScanCarry(),
    *,
    clmul: bool = True,
    naive_classify: bool = False,
) -> tuple[BlockMasks, ScanCarry]:
    """Run the whole stage-1 mask pipeline over one 64-byte block."""
    if len(block) != 64:
        raise ValueError(f"block must be 64 bytes, got {len(block)}")
    backslash = eq_mask(block, 0x5C)
    raw_quote = eq_mask(block, 0x22)
    escaped, bs_carry = odd_backslash_ends(backslash, carry.odd_backslash_carry)
    quote = raw_quote & ~escaped
    in_string, str_carry = string_mask(quote, carry.in_string_carry, clmul)
    if naive_classify:
        structural, whitespace = classify_block_naive(block)
    else:
        structural, whitespace = classify_block(block)
    final, sep_carry = finalize_structurals(
        structural, whitespace, quote, in_string, carry.prev_is_separator
    )
    masks = BlockMasks(
        backslash=backslash,
        raw_quote=raw_quote,
        escaped=escaped,
        unescaped_quote=quote,
        in_string=in_string,
        structural=structural,
        whitespace=whitespace,
        final_structural=final,
    )
    return masks, ScanCarry(bs_carry, str_carry, sep_carry)


def mask_from_row(row: str) -> int:
    """Parse a figure-style row (``_`` and ``1``, byte 0 first) into a mask."""
    value = 0
    for i, ch in enumerate(row):
        if ch == "1":
            value |= 1 << i
    return value


def mask_to_row(mask: int, width: int = 64) -> str:
    return "".join("1" if mask >> i & 1 else "_" for i in range(width))
