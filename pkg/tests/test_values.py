import math
import random
import struct

import pytest

import jsontape
from jsontape.errors import ErrorCode
from jsontape.numbers import is_eight_digits, parse_eight_digits, parse_number, parse_number_value
from jsontape.oracle import decimal_to_float, oracle_parse
from jsontape.strings import parse_string, read_string

try:
    from jsontape import _core
except ImportError:
    _core = None


def loads1(text: bytes, backend):
    """Parse ``[text]`` and return the single element."""
    return jsontape.loads(b"[" + text + b"]", backend=backend)[0]


def rejects(text: bytes, backend, code):
    with pytest.raises(jsontape.ParseError) as err:
        jsontape.parse(b"[" + text + b"]", backend=backend)
    return err.value.code is code


class TestEightDigits:
    def test_examples(self):
        assert is_eight_digits(b"00000000")
        assert not is_eight_digits(b"1234567a")
        assert parse_eight_digits(b"12345678") == 12345678
        assert parse_eight_digits(b"00000000") == 0
        assert parse_eight_digits(b"99999999") == 99999999

    def test_position_sweep(self):
        for pos in range(8):
            for b in range(256):
                chunk = bytearray(b"55555555")
                chunk[pos] = b
                expected = all(0x30 <= c <= 0x39 for c in chunk)
                assert is_eight_digits(bytes(chunk)) is expected
                if _core is not None:
                    assert _core.is_eight_digits(bytes(chunk)) is expected

    def test_random_chunks(self):
        rng = random.Random(11)
        for _ in range(20000):
            text = b"%08d" % rng.randrange(10**8)
            assert parse_eight_digits(text) == int(text)
            if _core is not None:
                assert _core.parse_eight_digits(text, True) == int(text)
                assert _core.parse_eight_digits(text, False) == int(text)

    @pytest.mark.skipif(_core is None, reason="compiled core not built")
    def test_fast_path_used_for_long_fractions(self):
        _core.reset_eight_digit_hits()
        jsontape.parse(b"[3.14159265358979]", backend="compiled")
        assert _core.eight_digit_hits() >= 1


class TestNumbers:
    @pytest.mark.parametrize(
        "text, kind, value",
        [
            ("12", "integer", 12),
            ("3.1416", "float", 3.1416),
            ("1.2e+1", "float", 12.0),
            ("-0", "integer", 0),
            ("-0.0", "float", -0.0),
            ("9223372036854775807", "integer", 2**63 - 1),
            ("-9223372036854775808", "integer", -(2**63)),
            ("1e-400", "float", 0.0),
            ("0.1", "float", 0.1),
            ("1E2", "float", 100.0),
            ("123456789012345678901234567890.0", "float", 1.2345678901234568e29),
        ],
    )
    def test_accepted(self, backend, text, kind, value):
        got = parse_number_value(text)
        assert got.kind == kind and got.value == value
        doc_value = loads1(text.encode(), backend)
        assert type(doc_value) is (int if kind == "integer" else float)
        assert doc_value == value
        assert math.copysign(1, doc_value) == math.copysign(1, value)

    @pytest.mark.parametrize(
        "text",
        ["012", "1E+", ".1", "0e+", "1.", "+1", "0x1", "NaN", "Infinity", "-", "--1", "1e309", "-1e309",
         "9223372036854775808", "-9223372036854775809", "123456789012345678901234567890", "1.e5", "00", "-01", "1e", "1ee2", "1.5.2"],
    )
    def test_rejected(self, backend, text):
        raw = text.encode()
        with pytest.raises(jsontape.ParseError):
            jsontape.parse(b"[" + raw + b"]", backend=backend)
        assert not oracle_parse(b"[" + raw + b"]").accepted

    def test_number_errors_carry_code_and_offset(self, backend):
        with pytest.raises(jsontape.ParseError) as err:
            jsontape.parse(b"[1, 012]", backend=backend)
        assert err.value.code is ErrorCode.NUMBER_ERROR
        assert err.value.offset == 4

    def test_terminator_check(self):
        with pytest.raises(jsontape.ParseError):
            parse_number(b"12x", 0)
        assert parse_number(b"12,", 0) == (12, 2)

    def test_huge_exponents(self, backend):
        assert loads1(b"1e-0000000000000000000000400", backend) == 0.0
        assert loads1(b"1e0000000000000000000005", backend) == 1e5
        assert rejects(b"1e99999999999999999999", backend, ErrorCode.NUMBER_ERROR)

    def test_random_floats_within_one_ulp(self, backend):
        rng = random.Random(12)
        texts = []
        for _ in range(300 if backend == "python" else 5000):
            ip = str(rng.randrange(10 ** rng.randint(1, 20)))
            fp = "".join(rng.choices("0123456789", k=rng.randint(1, 25)))
            e = rng.randint(-320, 285)
            texts.append(f"{'-' if rng.random() < 0.5 else ''}{ip}.{fp}e{e}")
        doc = jsontape.loads(("[" + ",".join(texts) + "]").encode(), backend=backend)
        for text, got in zip(texts, doc):
            neg = text.startswith("-")
            mant, exp = text.lstrip("-").split("e")
            ip, fp = mant.split(".")
            ip = ip.lstrip("0") or "0"
            expected = decimal_to_float(neg, ip, fp, int(exp))
            a = struct.unpack("<q", struct.pack("<d", got))[0]
            b = struct.unpack("<q", struct.pack("<d", expected))[0]
            assert abs(a - b) <= 1, text


class TestStrings:
    @pytest.mark.parametrize(
        "text, payload",
        [
            (rb'"abc"', b"abc"),
            (rb'"\uD834\uDD1E"', b"\xf0\x9d\x84\x9e"),
            (rb'"\"\\\/\b\f\n\r\t"', b'"\\/\b\f\n\r\t'),
            (rb'"\u0000"', b"\x00"),
            (rb'"\u00e9\u6771"', "é東".encode()),
            ('"é🙂"'.encode(), "é🙂".encode()),
            (b'""', b""),
        ],
    )
    def test_decoding(self, backend, text, payload):
        dest = bytearray()
        entry, end = parse_string(text + bytes(64), 0, dest)
        assert read_string(bytes(dest), entry) == payload
        assert end == len(text)
        doc = jsontape.parse(b"[" + text + b"]", backend=backend)
        assert read_string(doc.strings, doc.payload(2)) == payload

    @pytest.mark.parametrize(
        "text",
        [b'"a\nb"', rb'"\q"', rb'"\uD834"', rb'"\uDD1E"', rb'"\uD834A"', rb'"\u12G4"', b'"abc', rb'"\uDD1E\uD834"',
         b'"\x00"', b'"\x1f"'],
    )
    def test_rejected(self, backend, text):
        with pytest.raises(jsontape.ParseError) as err:
            jsontape.parse(b"[" + text + b"]", backend=backend)
        assert err.value.code in (ErrorCode.STRING_ERROR, ErrorCode.TAPE_ERROR)
        assert not oracle_parse(b"[" + text + b"]").accepted

    def test_error_offset_is_opening_quote(self, backend):
        with pytest.raises(jsontape.ParseError) as err:
            jsontape.parse(b'[1, "ab\\x"]', backend=backend)
        assert err.value.code is ErrorCode.STRING_ERROR
        assert err.value.offset == 4

    def test_long_strings_cross_copy_chunks(self, backend):
        for n in (0, 1, 31, 32, 33, 63, 64, 65, 200):
            s = "x" * n + "\\n" + "é" * n
            assert loads1(f'"{s}"'.encode(), backend) == "x" * n + "\n" + "é" * n

    def test_unescaped_payload_equals_source(self, backend):
        rng = random.Random(13)
        for _ in range(200):
            body = "".join(rng.choices("abc XYZ/é東🙂", k=rng.randint(0, 80))).encode()
            doc = jsontape.parse(b'"' + body + b'"', backend=backend)
            assert read_string(doc.strings, doc.payload(1)) == body
