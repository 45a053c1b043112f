# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled backend: thin wrappers over the C kernels in ``_kernels.h``."""

from array import array

from cpython cimport array as carray
from libc.stdint cimport int64_t, uint8_t, uint32_t, uint64_t
from libc.stdlib cimport free, malloc
from libc.string cimport memcpy, memset

from jsontape.errors import ErrorCode, ParseError, Utf8Error
from jsontape.utf8 import first_invalid_offset

cdef extern from "_kernels.h":
    int JT_HAVE_AVX2
    int JT_PADDING

    ctypedef struct jt_masks:
        uint64_t backslash, raw_quote, escaped, quote, in_string, structural, whitespace, final

    ctypedef struct jt_carry:
        uint64_t bs, in_str, sep

    void jt_init_tables()
    uint64_t jt_eight_digit_hits
    void jt_scan_block(const uint8_t *p, jt_carry *carry, jt_masks *m, int clmul, int naive_classify, int simd)
    uint32_t *jt_flatten(uint32_t *b, uint32_t base, uint64_t s)
    uint32_t *jt_flatten_naive(uint32_t *b, uint32_t base, uint64_t s)
    int jt_utf8_validate(const uint8_t *buf, size_t length, int simd)
    int jt_stage1(const uint8_t *buf, size_t length, uint32_t *out, size_t *count, int clmul,
                  int naive_extract, int naive_classify, int simd) nogil
    int jt_stage2(const uint8_t *buf, size_t length, const uint32_t *idx, size_t count, uint64_t *tape,
                  size_t *tape_len, uint8_t *strings, size_t *str_len, size_t *err_off, int simd)
    size_t jt_minify(const uint8_t *buf, size_t length, uint8_t *out, int simd) nogil
    int jt_is_eight_digits(const uint8_t *p)
    uint32_t jt_parse_eight_digits(const uint8_t *p, int simd)

jt_init_tables()

HAVE_AVX2 = bool(JT_HAVE_AVX2)
MAX_DOCUMENT_SIZE = 2**32 - 1

cdef carray.array _index_template = array("I")
cdef carray.array _tape_template = array("Q")


cdef class _Buffer:
    """Owned copy of a document with zero padding, or a view of a pre-padded one."""

    cdef const uint8_t[::1] view
    cdef uint8_t *owned
    cdef const uint8_t *ptr
    cdef size_t length
    cdef object source

    def __cinit__(self, data, Py_ssize_t length=-1):
        self.owned = NULL
        self.source = data
        self.view = memoryview(data).cast("B") if not isinstance(data, bytes) else data
        cdef size_t n = self.view.shape[0]
        if length >= 0:
            if <size_t>length + JT_PADDING > n:
                raise ValueError("pre-padded buffer needs PADDING zero bytes after length")
            self.length = length
            self.ptr = &self.view[0]
            return
        if n > MAX_DOCUMENT_SIZE:
            raise ParseError(ErrorCode.CAPACITY, None, f"{n} bytes exceeds {MAX_DOCUMENT_SIZE}")
        self.owned = <uint8_t *> malloc(n + JT_PADDING)
        if self.owned == NULL:
            raise MemoryError()
        if n:
            memcpy(self.owned, &self.view[0], n)
        memset(self.owned + n, 0, JT_PADDING)
        self.ptr = self.owned
        self.length = n

    def __dealloc__(self):
        if self.owned != NULL:
            free(self.owned)

    cdef bytes raw(self):
        return (<const char *> self.ptr)[:self.length]


cdef _fail(int code, object offset, _Buffer buf):
    if code == ErrorCode.UTF8_ERROR:
        raise Utf8Error(first_invalid_offset(buf.raw()))
    raise ParseError(ErrorCode(code), offset)


cdef carray.array _stage1(_Buffer buf, bint clmul, bint naive_extract, bint naive_classify, bint use_simd):
    cdef size_t count = 0
    cdef carray.array out = carray.clone(_index_template, buf.length + 9, False)
    cdef int rc
    cdef const uint8_t *ptr = buf.ptr
    cdef size_t length = buf.length
    cdef uint32_t *dest = out.data.as_uints
    with nogil:
        rc = jt_stage1(ptr, length, dest, &count, clmul, naive_extract, naive_classify, use_simd)
    if rc:
        _fail(rc, None, buf)
    carray.resize(out, count)
    return out


cdef tuple _stage2(_Buffer buf, const uint32_t[::1] index, bint use_simd, bint check):
    cdef size_t count = index.shape[0]
    cdef size_t tape_len = 0, str_len = 0, err_off = 0
    cdef carray.array tape = carray.clone(_tape_template, 2 * count + 4, False)
    cdef size_t cap = buf.length + 4 * count + 64
    cdef uint8_t *strings = <uint8_t *> malloc(cap)
    cdef const uint32_t *idx = &index[0] if count else NULL
    cdef int rc
    cdef size_t i
    if strings == NULL:
        raise MemoryError()
    try:
        for i in range(count if check else 0):
            if index[i] >= buf.length:
                raise ValueError("structural index does not belong to this document")
        rc = jt_stage2(buf.ptr, buf.length, idx, count, tape.data.as_ulonglongs, &tape_len,
                       strings, &str_len, &err_off, use_simd)
        if rc:
            _fail(rc, err_off, buf)
        carray.resize(tape, tape_len)
        return tape, (<const char *> strings)[:str_len]
    finally:
        free(strings)


def structural_index(data, Py_ssize_t length=-1, bint clmul=True, bint naive_extract=False,
                     bint naive_classify=False, bint use_simd=True):
    """Stage 1 as ``array('I')``; raises Utf8Error on invalid input."""
    return _stage1(_Buffer(data, length), clmul, naive_extract, naive_classify, use_simd)


def build_tape(data, index, Py_ssize_t length=-1, bint use_simd=True):
    """Stage 2 over an index from :func:`structural_index`; returns ``(tape, strings)``."""
    cdef _Buffer buf = _Buffer(data, length)
    if not isinstance(index, array) or index.typecode != "I":
        index = array("I", index)
    if not len(index):
        raise ParseError(ErrorCode.EMPTY, 0, "no JSON value")
    return _stage2(buf, index, use_simd, True)


def parse(data, Py_ssize_t length=-1, bint clmul=True, bint naive_extract=False,
          bint naive_classify=False, bint use_simd=True, list timings=None):
    """Both stages; appends stage wall times in ns to ``timings`` when given."""
    from time import perf_counter_ns

    cdef _Buffer buf = _Buffer(data, length)
    t0 = perf_counter_ns()
    index = _stage1(buf, clmul, naive_extract, naive_classify, use_simd)
    t1 = perf_counter_ns()
    if not len(index):
        raise ParseError(ErrorCode.EMPTY, 0, "no JSON value")
    result = _stage2(buf, index, use_simd, False)
    if timings is not None:
        timings.append(t1 - t0)
        timings.append(perf_counter_ns() - t1)
    return result


def minify(data, Py_ssize_t length=-1, bint use_simd=True):
    """Input bytes minus whitespace outside strings (no validation)."""
    cdef _Buffer buf = _Buffer(data, length)
    cdef uint8_t *out = <uint8_t *> malloc(buf.length + 64)
    cdef size_t n
    if out == NULL:
        raise MemoryError()
    try:
        with nogil:
            n = jt_minify(buf.ptr, buf.length, out, use_simd)
        return (<const char *> out)[:n]
    finally:
        free(out)


def validate_utf8(data, bint use_simd=True):
    cdef _Buffer buf = _Buffer(data)
    return bool(jt_utf8_validate(buf.ptr, buf.length, use_simd))


def validate_utf8_many(const uint8_t[::1] data, const int64_t[::1] offsets, bint use_simd=True):
    """Verdicts for ``data[offsets[k]:offsets[k+1]]``, one byte (0/1) per case."""
    cdef Py_ssize_t cases = offsets.shape[0] - 1
    cdef bytearray out = bytearray(max(cases, 0))
    cdef uint8_t block[64]
    cdef Py_ssize_t k
    cdef int64_t a, b
    for k in range(cases):
        a = offsets[k]
        b = offsets[k + 1]
        if b - a <= 64:
            memset(block, 0, 64)
            if b > a:
                memcpy(block, &data[a], b - a)
            out[k] = jt_utf8_validate(block, b - a, use_simd)
        else:
            out[k] = bool(validate_utf8(bytes(data[a:b]), use_simd))
    return bytes(out)


def scan_block(block, carry=(0, 0, 1), bint clmul=True, bint naive_classify=False, bint use_simd=True):
    """One 64-byte block through the mask pipeline.

    Returns ``(masks, carry)`` with masks ordered backslash, raw_quote,
    escaped, unescaped_quote, in_string, structural, whitespace,
    final_structural.
    """
    cdef const uint8_t[::1] view = block
    if view.shape[0] != 64:
        raise ValueError(f"block must be 64 bytes, got {view.shape[0]}")
    cdef jt_carry c
    cdef jt_masks m
    c.bs, c.in_str, c.sep = carry
    jt_scan_block(&view[0], &c, &m, clmul, naive_classify, use_simd)
    masks = (m.backslash, m.raw_quote, m.escaped, m.quote, m.in_string, m.structural, m.whitespace, m.final)
    return masks, (c.bs, c.in_str, c.sep)


def extract_indexes(uint64_t mask, uint32_t base=0, bint naive=False):
    cdef uint32_t out[72]
    cdef uint32_t *end = jt_flatten_naive(out, base, mask) if naive else jt_flatten(out, base, mask)
    return [out[i] for i in range(end - out)]


def is_eight_digits(chunk):
    cdef const uint8_t[::1] view = chunk
    if view.shape[0] < 8:
        raise ValueError("need 8 bytes")
    return bool(jt_is_eight_digits(&view[0]))


def parse_eight_digits(chunk, bint use_simd=True):
    cdef uint8_t tmp[16]
    cdef const uint8_t[::1] view = chunk
    if view.shape[0] < 8:
        raise ValueError("need 8 bytes")
    memset(tmp, 0, 16)
    memcpy(tmp, &view[0], 8)
    return jt_parse_eight_digits(tmp, use_simd)


def eight_digit_hits():
    """Number of eight-digit chunks converted since import (or the last reset)."""
    return jt_eight_digit_hits


def reset_eight_digit_hits():
    global jt_eight_digit_hits
    jt_eight_digit_hits = 0
