"""Whole-input UTF-8 validation over 64-byte blocks.

Each lane gets a length class from its high nibble (1 for ASCII, 0 for a
continuation byte, 2/3/4 for lead bytes). Two shift/saturating-subtract/add
rounds spread each lead's length over its continuation bytes; the sum at a
continuation must stay positive and the sum at a lead or ASCII byte must not
exceed its own class. A handful of byte-pair checks cover the ranges the
length rule cannot see (overlong forms, surrogates, values above U+10FFFF).

All checks OR into one error flag that is inspected once at the end. Blocks
made only of ASCII skip the lane work and only check that no sequence was
left open by the previous block.
"""

from __future__ import annotations

from dataclasses import dataclass

# high nibble -> length class
NIBBLE_CLASS = (1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 2, 2, 3, 4)

# minimum byte that may follow a lead with this high nibble, as signed bytes;
# -128 means "no constraint" (the comparison can never be true)
_INITIAL_MINS = (-128,) * 12 + (-62, -128, -31, -15)  # 0xC2, -, 0xE1, 0xF1
_SECOND_MINS = (-128,) * 12 + (127, 127, -96, -112)  # -, -, 0xA0, 0x90


def _signed(b: int) -> int:
    return b - 256 if b & 0x80 else b


def _sat_sub(a: int, b: int) -> int:
    return a - b if a > b else 0


def sequence_length_check(class_vector: list[int] | tuple[int, ...]) -> bool:
    """Run the two carry rounds over a class vector and check every lane.

    The lanes before the vector are taken to be ASCII.
    """
    n = len(class_vector)
    sums = [class_vector[i] + _sat_sub(class_vector[i - 1] if i else 1, 1) for i in range(n)]
    for i in range(n):
        prev2 = sums[i - 2] if i >= 2 else 1
        carried = sums[i] + _sat_sub(prev2, 2)
        length = class_vector[i]
        if (carried > length) == (length > 0):
            return False
    return True


def carry_rounds(class_vector: list[int]) -> tuple[list[int], list[int]]:
    """Intermediate and final vectors of the two rounds (for inspection)."""
    n = len(class_vector)
    sums = [class_vector[i] + _sat_sub(class_vector[i - 1] if i else 1, 1) for i in range(n)]
    final = [sums[i] + _sat_sub(sums[i - 2] if i >= 2 else 1, 2) for i in range(n)]
    return sums, final


@dataclass
class Utf8State:
    """Validation state carried from one block to the next."""

    error: int = 0
    prev_byte: int = 0
    prev_class: int = 1
    prev_sums: tuple[int, int] = (1, 1)  # lanes -2 and -1

    def check_ascii_block(self) -> None:
        self.error |= self._open_tail()
        self.prev_byte = 0
        self.prev_class = 1
        self.prev_sums = (1, 1)

    def _open_tail(self) -> int:
        # a sequence started in the previous block still wants continuation bytes
        return int(self.prev_class >= 2 or self.prev_sums[0] >= 3 or self.prev_sums[1] >= 3)

    def check_block(self, block: bytes) -> None:
        err = 0
        classes = [NIBBLE_CLASS[b >> 4] for b in block]
        prev_class = self.prev_class
        sums = []
        for c in classes:
            sums.append(c + _sat_sub(prev_class, 1))
            prev_class = c
        s2, s1 = self.prev_sums
        prev_byte = self.prev_byte
        for i, b in enumerate(block):
            c = classes[i]
            carried = sums[i] + _sat_sub(s2, 2)
            s2, s1 = s1, sums[i]
            err |= (carried > c) == (c > 0)
            err |= b > 0xF4
            sb = _signed(b)
            if prev_byte == 0xED:
                err |= sb > -97  # > 0x9F
            elif prev_byte == 0xF4:
                err |= sb > -113  # > 0x8F
            hi = prev_byte >> 4
            err |= (_INITIAL_MINS[hi] > _signed(prev_byte)) and (_SECOND_MINS[hi] > sb)
            prev_byte = b
        self.error |= err
        self.prev_byte = prev_byte
        self.prev_class = classes[-1] if classes else self.prev_class
        self.prev_sums = (s2, s1)

    def finish(self) -> bool:
        """True when everything seen so far is valid and no sequence is open."""
        self.error |= self._open_tail()
        return not self.error


def validate_utf8(data: bytes) -> bool:
    state = Utf8State()
    n = len(data)
    for start in range(0, n, 64):
        block = data[start : start + 64]
        if len(block) < 64:
            block = block + bytes(64 - len(block))
        if block.isascii():
            state.check_ascii_block()
        else:
            state.check_block(block)
    return state.finish()


def first_invalid_offset(data: bytes) -> int | None:
    """Diagnostic second pass: offset of the first invalid sequence, or None."""
    try:
        data.decode("utf-8")
    except UnicodeDecodeError as exc:
        return exc.start
    return None
