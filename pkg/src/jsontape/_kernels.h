/* Stage-1 and stage-2 kernels for the compiled backend.
 *
 * Every routine has an AVX2 body and a portable scalar body; `simd`
 * selects between them at run time so both can be tested on one host.
 * Inputs are always followed by at least 64 zero bytes.
 */
#ifndef JSONTAPE_KERNELS_H
#define JSONTAPE_KERNELS_H

#include <Python.h>
#include <math.h>
#include <stdint.h>
#include <stdlib.h>
#include <string.h>

#if defined(__AVX2__) && defined(__PCLMUL__)
#define JT_HAVE_AVX2 1
#include <immintrin.h>
#else
#define JT_HAVE_AVX2 0
#endif

#define JT_EVEN 0x5555555555555555ULL
#define JT_ODD 0xAAAAAAAAAAAAAAAAULL
#define JT_MAX_DEPTH 1024
#define JT_PADDING 64

enum {
    JT_SUCCESS = 0,
    JT_UTF8 = 1,
    JT_STRING = 2,
    JT_NUMBER = 3,
    JT_TAPE = 4,
    JT_DEPTH = 5,
    JT_CAPACITY = 6,
    JT_EMPTY = 7
};

typedef struct {
    uint64_t backslash, raw_quote, escaped, quote, in_string, structural, whitespace, final;
} jt_masks;

typedef struct {
    uint64_t bs;  /* odd backslash run pending */
    uint64_t in_str; /* inside a string */
    uint64_t sep; /* previous byte was structural or whitespace */
} jt_carry;

static const uint8_t jt_low_nibble[16] = {16, 0, 0, 0, 0, 0, 0, 0, 0, 8, 10, 4, 1, 12, 0, 0};
static const uint8_t jt_high_nibble[16] = {8, 0, 17, 2, 0, 4, 0, 4, 0, 0, 0, 0, 0, 0, 0, 0};

static inline int jt_tz(uint64_t s) {
#if defined(__BMI__)
    return (int)_tzcnt_u64(s);
#else
    return s ? __builtin_ctzll(s) : 64;
#endif
}

/* ---- prefix xor ------------------------------------------------------- */

static inline uint64_t jt_prefix_xor_ladder(uint64_t m) {
    m ^= m << 1;
    m ^= m << 2;
    m ^= m << 4;
    m ^= m << 8;
    m ^= m << 16;
    m ^= m << 32;
    return m;
}

static inline uint64_t jt_clmul_soft(uint64_t a, uint64_t b) {
    uint64_t r = 0;
    for (int i = 0; i < 64; i++)
        if (b >> i & 1) r ^= a << i;
    return r;
}

static inline uint64_t jt_prefix_xor_clmul(uint64_t m, int simd) {
#if JT_HAVE_AVX2
    if (simd) {
        __m128i r = _mm_clmulepi64_si128(_mm_set_epi64x(0, (long long)m), _mm_set1_epi8((char)0xFF), 0);
        return (uint64_t)_mm_cvtsi128_si64(r);
    }
#endif
    return jt_clmul_soft(m, ~0ULL);
}

/* ---- per-block masks -------------------------------------------------- */

static inline uint64_t jt_odd_backslash_ends(uint64_t bs, uint64_t *carry) {
    uint64_t starts = bs & ~(bs << 1);
    uint64_t even_start_mask = JT_EVEN ^ *carry;
    uint64_t even_starts = starts & even_start_mask;
    uint64_t odd_starts = starts & ~even_start_mask;
    uint64_t even_carries = bs + even_starts;
    uint64_t odd_carries;
    uint64_t overflow = __builtin_add_overflow(bs, odd_starts, &odd_carries);
    odd_carries |= *carry;
    *carry = overflow;
    uint64_t even_carry_ends = even_carries & ~bs;
    uint64_t odd_carry_ends = odd_carries & ~bs;
    return (even_carry_ends & JT_ODD) | (odd_carry_ends & JT_EVEN);
}

static inline uint64_t jt_eq_scalar(const uint8_t *p, uint8_t c) {
    uint64_t m = 0;
    for (int i = 0; i < 64; i++) m |= (uint64_t)(p[i] == c) << i;
    return m;
}

static inline void jt_classify_scalar(const uint8_t *p, uint64_t *s, uint64_t *w) {
    uint64_t sm = 0, wm = 0;
    for (int i = 0; i < 64; i++) {
        uint8_t c = jt_low_nibble[p[i] & 0xF] & jt_high_nibble[p[i] >> 4];
        sm |= (uint64_t)((c & 0x7) != 0) << i;
        wm |= (uint64_t)((c & 0x18) != 0) << i;
    }
    *s = sm;
    *w = wm;
}

static inline void jt_classify_naive_scalar(const uint8_t *p, uint64_t *s, uint64_t *w) {
    uint64_t sm = 0, wm = 0;
    for (int i = 0; i < 64; i++) {
        uint8_t c = p[i];
        sm |= (uint64_t)(c == ',' || c == ':' || c == '[' || c == ']' || c == '{' || c == '}') << i;
        wm |= (uint64_t)(c == ' ' || c == '\t' || c == '\n' || c == '\r') << i;
    }
    *s = sm;
    *w = wm;
}

#if JT_HAVE_AVX2
static inline uint64_t jt_movemask64(__m256i lo, __m256i hi) {
    uint32_t a = (uint32_t)_mm256_movemask_epi8(lo);
    uint32_t b = (uint32_t)_mm256_movemask_epi8(hi);
    return (uint64_t)a | ((uint64_t)b << 32);
}

static inline uint64_t jt_eq_avx2(__m256i v0, __m256i v1, uint8_t c) {
    __m256i k = _mm256_set1_epi8((char)c);
    return jt_movemask64(_mm256_cmpeq_epi8(v0, k), _mm256_cmpeq_epi8(v1, k));
}

static inline void jt_classify_avx2(__m256i v0, __m256i v1, uint64_t *s, uint64_t *w) {
    const __m256i lo_tab = _mm256_setr_epi8(16, 0, 0, 0, 0, 0, 0, 0, 0, 8, 10, 4, 1, 12, 0, 0,
                                            16, 0, 0, 0, 0, 0, 0, 0, 0, 8, 10, 4, 1, 12, 0, 0);
    const __m256i hi_tab = _mm256_setr_epi8(8, 0, 17, 2, 0, 4, 0, 4, 0, 0, 0, 0, 0, 0, 0, 0,
                                            8, 0, 17, 2, 0, 4, 0, 4, 0, 0, 0, 0, 0, 0, 0, 0);
    const __m256i nib = _mm256_set1_epi8(0x0F);
    const __m256i zero = _mm256_setzero_si256();
    __m256i c0 = _mm256_and_si256(_mm256_shuffle_epi8(lo_tab, _mm256_and_si256(v0, nib)),
                                  _mm256_shuffle_epi8(hi_tab, _mm256_and_si256(_mm256_srli_epi16(v0, 4), nib)));
    __m256i c1 = _mm256_and_si256(_mm256_shuffle_epi8(lo_tab, _mm256_and_si256(v1, nib)),
                                  _mm256_shuffle_epi8(hi_tab, _mm256_and_si256(_mm256_srli_epi16(v1, 4), nib)));
    __m256i sk = _mm256_set1_epi8(0x7), wk = _mm256_set1_epi8(0x18);
    *s = ~jt_movemask64(_mm256_cmpeq_epi8(_mm256_and_si256(c0, sk), zero),
                        _mm256_cmpeq_epi8(_mm256_and_si256(c1, sk), zero));
    *w = ~jt_movemask64(_mm256_cmpeq_epi8(_mm256_and_si256(c0, wk), zero),
                        _mm256_cmpeq_epi8(_mm256_and_si256(c1, wk), zero));
}

static inline void jt_classify_naive_avx2(__m256i v0, __m256i v1, uint64_t *s, uint64_t *w) {
    static const char sc[6] = {',', ':', '[', ']', '{', '}'};
    static const char wc[4] = {' ', '\t', '\n', '\r'};
    uint64_t sm = 0, wm = 0;
    for (int i = 0; i < 6; i++) sm |= jt_eq_avx2(v0, v1, (uint8_t)sc[i]);
    for (int i = 0; i < 4; i++) wm |= jt_eq_avx2(v0, v1, (uint8_t)wc[i]);
    *s = sm;
    *w = wm;
}
#endif

static inline void jt_scan_block(const uint8_t *p, jt_carry *carry, jt_masks *m, int clmul, int naive_classify,
                                 int simd) {
#if JT_HAVE_AVX2
    if (simd) {
        __m256i v0 = _mm256_loadu_si256((const __m256i *)p);
        __m256i v1 = _mm256_loadu_si256((const __m256i *)(p + 32));
        m->backslash = jt_eq_avx2(v0, v1, '\\');
        m->raw_quote = jt_eq_avx2(v0, v1, '"');
        if (naive_classify)
            jt_classify_naive_avx2(v0, v1, &m->structural, &m->whitespace);
        else
            jt_classify_avx2(v0, v1, &m->structural, &m->whitespace);
    } else
#endif
    {
        m->backslash = jt_eq_scalar(p, '\\');
        m->raw_quote = jt_eq_scalar(p, '"');
        if (naive_classify)
            jt_classify_naive_scalar(p, &m->structural, &m->whitespace);
        else
            jt_classify_scalar(p, &m->structural, &m->whitespace);
    }
    m->escaped = jt_odd_backslash_ends(m->backslash, &carry->bs);
    m->quote = m->raw_quote & ~m->escaped;
    uint64_t r = (clmul ? jt_prefix_xor_clmul(m->quote, simd) : jt_prefix_xor_ladder(m->quote)) ^ (0 - carry->in_str);
    carry->in_str = r >> 63;
    m->in_string = r;

    uint64_t s = m->structural & ~r;
    s |= m->quote;
    uint64_t pred = s | m->whitespace;
    uint64_t pseudo = (pred << 1) | carry->sep;
    carry->sep = pred >> 63;
    pseudo &= ~m->whitespace & ~r;
    s |= pseudo;
    s &= ~(m->quote & ~r);
    m->final = s;
}

/* ---- index extraction ------------------------------------------------- */

static inline uint32_t *jt_flatten(uint32_t *b, uint32_t base, uint64_t s) {
    uint32_t *next = b + __builtin_popcountll(s);
    while (s) {
        /* eight decodes per round whatever the popcount; extras are overwritten later */
        b[0] = base + (uint32_t)jt_tz(s); s &= s - 1;
        b[1] = base + (uint32_t)jt_tz(s); s &= s - 1;
        b[2] = base + (uint32_t)jt_tz(s); s &= s - 1;
        b[3] = base + (uint32_t)jt_tz(s); s &= s - 1;
        b[4] = base + (uint32_t)jt_tz(s); s &= s - 1;
        b[5] = base + (uint32_t)jt_tz(s); s &= s - 1;
        b[6] = base + (uint32_t)jt_tz(s); s &= s - 1;
        b[7] = base + (uint32_t)jt_tz(s); s &= s - 1;
        b += 8;
    }
    return next;
}

static inline uint32_t *jt_flatten_naive(uint32_t *b, uint32_t base, uint64_t s) {
    while (s) {
        *b++ = base + (uint32_t)__builtin_ctzll(s);
        s &= s - 1;
    }
    return b;
}

/* ---- UTF-8 ------------------------------------------------------------ */

static const uint8_t jt_utf8_class[16] = {1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 2, 2, 3, 4};
static const int8_t jt_initial_mins[16] = {-128, -128, -128, -128, -128, -128, -128, -128,
                                           -128, -128, -128, -128, -62,  -128, -31,  -15};
static const int8_t jt_second_mins[16] = {-128, -128, -128, -128, -128, -128, -128, -128,
                                          -128, -128, -128, -128, 127,  127,  -96,  -112};

typedef struct {
    int error;
    uint8_t prev_byte;
    uint8_t prev_class;
    uint8_t prev_sums[2]; /* lanes -2, -1 */
#if JT_HAVE_AVX2
    __m256i v_err, v_prev, v_init, v_sums;
#endif
} jt_utf8;

static inline uint8_t jt_subs(uint8_t a, uint8_t b) { return a > b ? (uint8_t)(a - b) : 0; }

static inline void jt_utf8_init(jt_utf8 *u) {
    u->error = 0;
    u->prev_byte = 0;
    u->prev_class = 1;
    u->prev_sums[0] = u->prev_sums[1] = 1;
#if JT_HAVE_AVX2
    u->v_err = _mm256_setzero_si256();
    u->v_prev = _mm256_setzero_si256();
    u->v_init = _mm256_set1_epi8(1);
    u->v_sums = _mm256_set1_epi8(1);
#endif
}

static inline int jt_utf8_open_tail_scalar(const jt_utf8 *u) {
    return u->prev_class >= 2 || u->prev_sums[0] >= 3 || u->prev_sums[1] >= 3;
}

static inline void jt_utf8_block_scalar(jt_utf8 *u, const uint8_t *p) {
    int ascii = 1;
    for (int i = 0; i < 64; i++) ascii &= p[i] < 0x80;
    if (ascii) {
        u->error |= jt_utf8_open_tail_scalar(u);
        u->prev_byte = 0;
        u->prev_class = 1;
        u->prev_sums[0] = u->prev_sums[1] = 1;
        return;
    }
    int err = 0;
    uint8_t prev_class = u->prev_class, prev_byte = u->prev_byte;
    uint8_t s2 = u->prev_sums[0], s1 = u->prev_sums[1];
    for (int i = 0; i < 64; i++) {
        uint8_t b = p[i];
        uint8_t c = jt_utf8_class[b >> 4];
        uint8_t sum = c + jt_subs(prev_class, 1);
        uint8_t carried = sum + jt_subs(s2, 2);
        s2 = s1;
        s1 = sum;
        err |= (carried > c) == (c > 0);
        err |= b > 0xF4;
        int8_t sb = (int8_t)b;
        if (prev_byte == 0xED) err |= sb > (int8_t)0x9F;
        else if (prev_byte == 0xF4) err |= sb > (int8_t)0x8F;
        int hi = prev_byte >> 4;
        err |= (jt_initial_mins[hi] > (int8_t)prev_byte) && (jt_second_mins[hi] > sb);
        prev_byte = b;
        prev_class = c;
    }
    u->error |= err;
    u->prev_byte = prev_byte;
    u->prev_class = prev_class;
    u->prev_sums[0] = s2;
    u->prev_sums[1] = s1;
}

#if JT_HAVE_AVX2
static inline __m256i jt_prev1(__m256i prev, __m256i cur) {
    return _mm256_alignr_epi8(cur, _mm256_permute2x128_si256(prev, cur, 0x21), 15);
}

static inline __m256i jt_prev2(__m256i prev, __m256i cur) {
    return _mm256_alignr_epi8(cur, _mm256_permute2x128_si256(prev, cur, 0x21), 14);
}

static inline void jt_utf8_chunk_avx2(jt_utf8 *u, __m256i v) {
    const __m256i nib = _mm256_set1_epi8(0x0F);
    const __m256i class_tab = _mm256_setr_epi8(1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 2, 2, 3, 4,
                                               1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 2, 2, 3, 4);
    const __m256i init_tab = _mm256_setr_epi8(-128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128,
                                              -128, -62, -128, -31, -15, -128, -128, -128, -128, -128, -128, -128,
                                              -128, -128, -128, -128, -128, -62, -128, -31, -15);
    const __m256i second_tab = _mm256_setr_epi8(-128, -128, -128, -128, -128, -128, -128, -128, -128, -128, -128,
                                                -128, 127, 127, -96, -112, -128, -128, -128, -128, -128, -128, -128,
                                                -128, -128, -128, -128, -128, 127, 127, -96, -112);
    __m256i err = u->v_err;
    __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), nib);
    __m256i init = _mm256_shuffle_epi8(class_tab, hi);
    /* anything above 0xF4 survives the saturating subtraction */
    err = _mm256_or_si256(err, _mm256_subs_epu8(v, _mm256_set1_epi8((char)0xF4)));

    __m256i sums = _mm256_add_epi8(init, _mm256_subs_epu8(jt_prev1(u->v_init, init), _mm256_set1_epi8(1)));
    __m256i carries = _mm256_add_epi8(sums, _mm256_subs_epu8(jt_prev2(u->v_sums, sums), _mm256_set1_epi8(2)));
    err = _mm256_or_si256(err, _mm256_cmpeq_epi8(_mm256_cmpgt_epi8(carries, init),
                                                 _mm256_cmpgt_epi8(init, _mm256_setzero_si256())));

    __m256i off1 = jt_prev1(u->v_prev, v);
    __m256i bad_ed = _mm256_and_si256(_mm256_cmpeq_epi8(off1, _mm256_set1_epi8((char)0xED)),
                                      _mm256_cmpgt_epi8(v, _mm256_set1_epi8((char)0x9F)));
    __m256i bad_f4 = _mm256_and_si256(_mm256_cmpeq_epi8(off1, _mm256_set1_epi8((char)0xF4)),
                                      _mm256_cmpgt_epi8(v, _mm256_set1_epi8((char)0x8F)));
    err = _mm256_or_si256(err, _mm256_or_si256(bad_ed, bad_f4));

    __m256i off1_hi = _mm256_and_si256(_mm256_srli_epi16(off1, 4), nib);
    __m256i initial_under = _mm256_cmpgt_epi8(_mm256_shuffle_epi8(init_tab, off1_hi), off1);
    __m256i second_under = _mm256_cmpgt_epi8(_mm256_shuffle_epi8(second_tab, off1_hi), v);
    err = _mm256_or_si256(err, _mm256_and_si256(initial_under, second_under));

    u->v_err = err;
    u->v_prev = v;
    u->v_init = init;
    u->v_sums = sums;
}

static inline void jt_utf8_open_tail_avx2(jt_utf8 *u) {
    /* lane 31 still a lead byte, or lanes 30/31 owing continuation bytes */
    const __m256i init_max = _mm256_setr_epi8(127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127,
                                              127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127,
                                              127, 127, 127, 1);
    const __m256i sums_max = _mm256_setr_epi8(127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127,
                                              127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127, 127,
                                              127, 127, 2, 2);
    u->v_err = _mm256_or_si256(u->v_err, _mm256_or_si256(_mm256_cmpgt_epi8(u->v_init, init_max),
                                                         _mm256_cmpgt_epi8(u->v_sums, sums_max)));
}

static inline void jt_utf8_block_avx2(jt_utf8 *u, __m256i v0, __m256i v1) {
    if (_mm256_movemask_epi8(_mm256_or_si256(v0, v1)) == 0) {
        jt_utf8_open_tail_avx2(u);
        u->v_prev = _mm256_setzero_si256();
        u->v_init = _mm256_set1_epi8(1);
        u->v_sums = _mm256_set1_epi8(1);
        return;
    }
    jt_utf8_chunk_avx2(u, v0);
    jt_utf8_chunk_avx2(u, v1);
}
#endif

static inline void jt_utf8_block(jt_utf8 *u, const uint8_t *p, int simd) {
#if JT_HAVE_AVX2
    if (simd) {
        jt_utf8_block_avx2(u, _mm256_loadu_si256((const __m256i *)p), _mm256_loadu_si256((const __m256i *)(p + 32)));
        return;
    }
#endif
    jt_utf8_block_scalar(u, p);
}

/* nonzero when the whole stream was valid */
static inline int jt_utf8_finish(jt_utf8 *u, int simd) {
#if JT_HAVE_AVX2
    if (simd) {
        jt_utf8_open_tail_avx2(u);
        return _mm256_testz_si256(u->v_err, u->v_err);
    }
#endif
    u->error |= jt_utf8_open_tail_scalar(u);
    return !u->error;
}

/* `buf` must be readable for len rounded up to 64, with zeros past len */
static int jt_utf8_validate(const uint8_t *buf, size_t len, int simd) {
    jt_utf8 u;
    jt_utf8_init(&u);
    size_t whole = len & ~(size_t)63;
    for (size_t i = 0; i < whole; i += 64) jt_utf8_block(&u, buf + i, simd);
    if (whole < len) {
        uint8_t tail[64] = {0};
        memcpy(tail, buf + whole, len - whole);
        jt_utf8_block(&u, tail, simd);
    }
    return jt_utf8_finish(&u, simd);
}

/* ---- stage 1 ---------------------------------------------------------- */

/* `buf` holds len bytes followed by JT_PADDING zeros; `out` has room for len + 9 entries */
static int jt_stage1(const uint8_t *buf, size_t len, uint32_t *out, size_t *count, int clmul, int naive_extract,
                     int naive_classify, int simd) {
    jt_carry carry = {0, 0, 1};
    jt_masks m;
    jt_utf8 u;
    jt_utf8_init(&u);
    uint32_t *b = out;
    for (size_t i = 0; i < len; i += 64) {
        const uint8_t *p = buf + i;
        jt_utf8_block(&u, p, simd);
        jt_scan_block(p, &carry, &m, clmul, naive_classify, simd);
        uint64_t s = m.final;
        if (len - i < 64) s &= (1ULL << (len - i)) - 1;
        b = naive_extract ? jt_flatten_naive(b, (uint32_t)i, s) : jt_flatten(b, (uint32_t)i, s);
    }
    *count = (size_t)(b - out);
    return jt_utf8_finish(&u, simd) ? JT_SUCCESS : JT_UTF8;
}

/* ---- minification ----------------------------------------------------- */

/* Drops whitespace outside strings; `out` needs len bytes. Returns the new length. */
static size_t jt_minify(const uint8_t *buf, size_t len, uint8_t *out, int simd) {
    jt_carry carry = {0, 0, 1};
    jt_masks m;
    size_t o = 0;
    for (size_t i = 0; i < len; i += 64) {
        const uint8_t *p = buf + i;
        jt_scan_block(p, &carry, &m, 1, 0, simd);
        uint64_t keep = ~(m.whitespace & ~m.in_string);
        size_t n = len - i < 64 ? len - i : 64;
        if (n < 64) keep &= (1ULL << n) - 1;
        if (keep == ~0ULL) {
            memcpy(out + o, p, 64);
            o += 64;
            continue;
        }
        while (keep) {
            out[o++] = p[jt_tz(keep)];
            keep &= keep - 1;
        }
    }
    return o;
}

/* ---- numbers ---------------------------------------------------------- */

static const double jt_pow10[23] = {1e0,  1e1,  1e2,  1e3,  1e4,  1e5,  1e6,  1e7,  1e8,  1e9,  1e10, 1e11,
                                    1e12, 1e13, 1e14, 1e15, 1e16, 1e17, 1e18, 1e19, 1e20, 1e21, 1e22};

static uint8_t jt_terminator[256];
static uint8_t jt_hexval[256];

static void jt_init_tables(void) {
    memset(jt_terminator, 0, sizeof jt_terminator);
    const char *t = ",:[]{} \t\n\r";
    for (; *t; t++) jt_terminator[(uint8_t)*t] = 1;
    memset(jt_hexval, 0xFF, sizeof jt_hexval);
    for (int i = 0; i < 10; i++) jt_hexval['0' + i] = (uint8_t)i;
    for (int i = 0; i < 6; i++) jt_hexval['a' + i] = jt_hexval['A' + i] = (uint8_t)(10 + i);
}

static uint64_t jt_eight_digit_hits = 0;

static inline int jt_is_digit(uint8_t c) { return (uint8_t)(c - '0') < 10; }

static inline int jt_is_eight_digits(const uint8_t *p) {
    uint64_t val;
    memcpy(&val, p, 8);
    return (((val & 0xF0F0F0F0F0F0F0F0ULL) | (((val + 0x0606060606060606ULL) & 0xF0F0F0F0F0F0F0F0ULL) >> 4)) ==
            0x3333333333333333ULL);
}

static inline uint32_t jt_parse_eight_digits(const uint8_t *p, int simd) {
#if JT_HAVE_AVX2
    if (simd) {
        const __m128i ascii0 = _mm_set1_epi8('0');
        const __m128i mul_1_10 = _mm_setr_epi8(10, 1, 10, 1, 10, 1, 10, 1, 10, 1, 10, 1, 10, 1, 10, 1);
        const __m128i mul_1_100 = _mm_setr_epi16(100, 1, 100, 1, 100, 1, 100, 1);
        const __m128i mul_1_10000 = _mm_setr_epi16(10000, 1, 10000, 1, 10000, 1, 10000, 1);
        __m128i in = _mm_sub_epi8(_mm_loadl_epi64((const __m128i *)p), ascii0);
        __m128i t1 = _mm_maddubs_epi16(in, mul_1_10);
        __m128i t2 = _mm_madd_epi16(t1, mul_1_100);
        __m128i t3 = _mm_packus_epi32(t2, t2);
        __m128i t4 = _mm_madd_epi16(t3, mul_1_10000);
        return (uint32_t)_mm_cvtsi128_si32(t4);
    }
#endif
    /* same three multiply-add rounds on a single 64-bit word */
    uint64_t val;
    memcpy(&val, p, 8);
    val = (val & 0x0F0F0F0F0F0F0F0FULL) * 2561 >> 8;             /* (10, 1) */
    val = (val & 0x00FF00FF00FF00FFULL) * 6553601 >> 16;         /* (100, 1) */
    return (uint32_t)((val & 0x0000FFFF0000FFFFULL) * 42949672960001ULL >> 32); /* (10000, 1) */
}

/* Writes the tag word and the raw value word; returns an error code. */
static int jt_parse_number(const uint8_t *buf, size_t off, size_t len, uint64_t *w, int simd) {
    size_t i = off;
    int neg = buf[i] == '-';
    i += neg;
    if (buf[i] == '0') {
        i++;
        if (jt_is_digit(buf[i])) return JT_NUMBER;
    } else if (buf[i] >= '1' && buf[i] <= '9') {
        i++;
        while (jt_is_digit(buf[i])) i++;
    } else {
        return JT_NUMBER;
    }
    size_t digit_count = i - off - neg;
    uint64_t mant = 0; /* only meaningful while digit_count <= 19 */
    for (size_t k = off + neg; k < i; k++) mant = mant * 10 + (uint64_t)(buf[k] - '0');
    int is_float = 0;
    int64_t exponent = 0;

    if (buf[i] == '.') {
        is_float = 1;
        i++;
        if (!jt_is_digit(buf[i])) return JT_NUMBER;
        size_t frac = i;
        while (jt_is_eight_digits(buf + i)) {
            jt_eight_digit_hits++;
            mant = mant * 100000000ULL + jt_parse_eight_digits(buf + i, simd);
            i += 8;
        }
        while (jt_is_digit(buf[i])) {
            mant = mant * 10 + (uint64_t)(buf[i] - '0');
            i++;
        }
        digit_count += i - frac;
        exponent = -(int64_t)(i - frac);
    }
    if (buf[i] == 'e' || buf[i] == 'E') {
        is_float = 1;
        i++;
        int eneg = 0;
        if (buf[i] == '+' || buf[i] == '-') {
            eneg = buf[i] == '-';
            i++;
        }
        size_t estart = i;
        while (jt_is_digit(buf[i])) i++;
        if (i == estart) return JT_NUMBER;
        size_t k = estart;
        while (k < i && buf[k] == '0') k++;
        int64_t ev = 0;
        if (i - k > 18) {
            ev = 1000000000000000000LL;
        } else {
            for (; k < i; k++) ev = ev * 10 + (buf[k] - '0');
        }
        exponent += eneg ? -ev : ev;
    }
    if (i < len && !jt_terminator[buf[i]]) return JT_NUMBER;

    if (!is_float) {
        if (digit_count > 19) return JT_NUMBER;
        if (neg) {
            if (mant > 9223372036854775808ULL) return JT_NUMBER;
            w[0] = (uint64_t)'l' << 56;
            w[1] = 0 - mant;
        } else {
            if (mant > 9223372036854775807ULL) return JT_NUMBER;
            w[0] = (uint64_t)'l' << 56;
            w[1] = mant;
        }
        return JT_SUCCESS;
    }
    double d;
    if (digit_count <= 19 && mant <= (1ULL << 53) && exponent >= -22 && exponent <= 22) {
        d = (double)mant;
        d = exponent >= 0 ? d * jt_pow10[exponent] : d / jt_pow10[-exponent];
    } else {
        size_t n = i - off - neg;
        char small[128];
        char *text = n < sizeof small ? small : (char *)malloc(n + 1);
        if (!text) return JT_NUMBER;
        memcpy(text, buf + off + neg, n);
        text[n] = 0;
        char *end = NULL;
        d = PyOS_string_to_double(text, &end, NULL);
        int bad = (d == -1.0 && PyErr_Occurred()) || end != text + n;
        if (bad) PyErr_Clear();
        if (text != small) free(text);
        if (bad) return JT_NUMBER;
    }
    if (isinf(d)) return JT_NUMBER;
    if (neg) d = -d;
    w[0] = (uint64_t)'d' << 56;
    memcpy(&w[1], &d, 8);
    return JT_SUCCESS;
}

/* ---- strings ---------------------------------------------------------- */

static inline int jt_hex4(const uint8_t *p, uint32_t *out) {
    uint32_t a = jt_hexval[p[0]], b = jt_hexval[p[1]], c = jt_hexval[p[2]], d = jt_hexval[p[3]];
    if ((a | b | c | d) & 0xF0) return 0;
    *out = a << 12 | b << 8 | c << 4 | d;
    return 1;
}

static inline uint8_t *jt_put_utf8(uint8_t *d, uint32_t cp) {
    if (cp < 0x80) {
        *d++ = (uint8_t)cp;
    } else if (cp < 0x800) {
        *d++ = (uint8_t)(0xC0 | cp >> 6);
        *d++ = (uint8_t)(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        *d++ = (uint8_t)(0xE0 | cp >> 12);
        *d++ = (uint8_t)(0x80 | (cp >> 6 & 0x3F));
        *d++ = (uint8_t)(0x80 | (cp & 0x3F));
    } else {
        *d++ = (uint8_t)(0xF0 | cp >> 18);
        *d++ = (uint8_t)(0x80 | (cp >> 12 & 0x3F));
        *d++ = (uint8_t)(0x80 | (cp >> 6 & 0x3F));
        *d++ = (uint8_t)(0x80 | (cp & 0x3F));
    }
    return d;
}

static const uint8_t jt_escape_map[256] = {
    ['"'] = '"', ['\\'] = '\\', ['/'] = '/', ['b'] = '\b', ['f'] = '\f', ['n'] = '\n', ['r'] = '\r', ['t'] = '\t',
};

/* Copies 32 source bytes per round into `dst`; needs 32 bytes of slack there. */
static int jt_parse_string(const uint8_t *buf, size_t q, uint8_t *strings, size_t *slen, int simd) {
    const uint8_t *src = buf + q + 1;
    uint8_t *entry = strings + *slen;
    uint8_t *dst = entry + 4;
    for (;;) {
        uint32_t bs, quote, ctrl;
#if JT_HAVE_AVX2
        if (simd) {
            __m256i v = _mm256_loadu_si256((const __m256i *)src);
            _mm256_storeu_si256((__m256i *)dst, v);
            bs = (uint32_t)_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, _mm256_set1_epi8('\\')));
            quote = (uint32_t)_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, _mm256_set1_epi8('"')));
            ctrl = (uint32_t)_mm256_movemask_epi8(_mm256_cmpeq_epi8(_mm256_min_epu8(v, _mm256_set1_epi8(0x1F)), v));
        } else
#endif
        {
            bs = quote = ctrl = 0;
            for (int k = 0; k < 32; k++) {
                uint8_t c = src[k];
                dst[k] = c;
                bs |= (uint32_t)(c == '\\') << k;
                quote |= (uint32_t)(c == '"') << k;
                ctrl |= (uint32_t)(c < 0x20) << k;
            }
        }
        if (((bs - 1) & quote) != 0) {
            int qi = __builtin_ctz(quote);
            if (ctrl & ((1u << qi) - 1)) return JT_STRING;
            dst += qi;
            break;
        }
        if (((quote - 1) & bs) != 0) {
            int bi = __builtin_ctz(bs);
            if (ctrl & ((1u << bi) - 1)) return JT_STRING;
            src += bi;
            dst += bi;
            uint8_t e = src[1];
            if (e == 'u') {
                uint32_t cp, lo;
                if (!jt_hex4(src + 2, &cp)) return JT_STRING;
                src += 6;
                if (cp >= 0xD800 && cp <= 0xDBFF) {
                    if (src[0] != '\\' || src[1] != 'u' || !jt_hex4(src + 2, &lo) || lo < 0xDC00 || lo > 0xDFFF)
                        return JT_STRING;
                    cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
                    src += 6;
                } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
                    return JT_STRING;
                }
                dst = jt_put_utf8(dst, cp);
            } else {
                uint8_t r = jt_escape_map[e];
                if (!r) return JT_STRING;
                *dst++ = r;
                src += 2;
            }
            continue;
        }
        if (ctrl) return JT_STRING;
        src += 32;
        dst += 32;
    }
    uint32_t n = (uint32_t)(dst - entry - 4);
    memcpy(entry, &n, 4);
    *slen = (size_t)(dst - strings);
    return JT_SUCCESS;
}

/* ---- stage 2 ---------------------------------------------------------- */

#define JT_WORD(tag, payload) (((uint64_t)(uint8_t)(tag) << 56) | (uint64_t)(payload))

static inline int jt_atom(const uint8_t *buf, size_t pos, size_t len, const char *text, size_t n) {
    return memcmp(buf + pos, text, n) == 0 && (pos + n >= len || jt_terminator[buf[pos + n]]);
}

/* tape needs 2*count + 4 words; strings need len + 4*count + 64 bytes */
static int jt_stage2(const uint8_t *buf, size_t len, const uint32_t *idx, size_t count, uint64_t *tape,
                     size_t *tape_len, uint8_t *strings, size_t *str_len, size_t *err_off, int simd) {
    uint32_t stack[JT_MAX_DEPTH];
    size_t depth = 0, i = 0, t = 1, s = 0, pos = 0;
    uint8_t c = 0;
    int rc;
    *str_len = 0;
    *tape_len = 0;
    if (count == 0) {
        *err_off = 0;
        return JT_EMPTY;
    }

#define JT_NEXT()                      \
    do {                               \
        if (i >= count) {              \
            *err_off = len;            \
            return JT_TAPE;            \
        }                              \
        pos = idx[i++];                \
        c = buf[pos];                  \
    } while (0)
#define JT_FAIL(code)   \
    do {                \
        *err_off = pos; \
        return (code);  \
    } while (0)
#define JT_CLOSE(tag)                                          \
    do {                                                       \
        uint32_t opener = stack[--depth];                      \
        tape[opener] |= (uint64_t)(t + 1);                     \
        tape[t++] = JT_WORD(tag, opener);                      \
    } while (0)

    JT_NEXT();
value:
    switch (c) {
    case '{':
        if (depth >= JT_MAX_DEPTH) JT_FAIL(JT_DEPTH);
        stack[depth++] = (uint32_t)t;
        tape[t++] = JT_WORD('{', 0);
        if (i < count && buf[idx[i]] == '}') {
            i++;
            JT_CLOSE('}');
            goto after_value;
        }
        goto object_key;
    case '[':
        if (depth >= JT_MAX_DEPTH) JT_FAIL(JT_DEPTH);
        stack[depth++] = (uint32_t)t;
        tape[t++] = JT_WORD('[', 0);
        if (i < count && buf[idx[i]] == ']') {
            i++;
            JT_CLOSE(']');
            goto after_value;
        }
        JT_NEXT();
        goto value;
    case '"':
        tape[t++] = JT_WORD('"', s);
        if ((rc = jt_parse_string(buf, pos, strings, &s, simd))) JT_FAIL(rc);
        goto after_value;
    case 't':
        if (!jt_atom(buf, pos, len, "true", 4)) JT_FAIL(JT_TAPE);
        tape[t++] = JT_WORD('t', 0);
        goto after_value;
    case 'f':
        if (!jt_atom(buf, pos, len, "false", 5)) JT_FAIL(JT_TAPE);
        tape[t++] = JT_WORD('f', 0);
        goto after_value;
    case 'n':
        if (!jt_atom(buf, pos, len, "null", 4)) JT_FAIL(JT_TAPE);
        tape[t++] = JT_WORD('n', 0);
        goto after_value;
    case '-': case '0': case '1': case '2': case '3': case '4':
    case '5': case '6': case '7': case '8': case '9':
        if ((rc = jt_parse_number(buf, pos, len, tape + t, simd))) JT_FAIL(rc);
        t += 2;
        goto after_value;
    default:
        JT_FAIL(JT_TAPE);
    }

object_key:
    JT_NEXT();
    if (c != '"') JT_FAIL(JT_TAPE);
    tape[t++] = JT_WORD('"', s);
    if ((rc = jt_parse_string(buf, pos, strings, &s, simd))) JT_FAIL(rc);
    JT_NEXT();
    if (c != ':') JT_FAIL(JT_TAPE);
    JT_NEXT();
    goto value;

after_value:
    if (depth == 0) {
        if (i != count) {
            pos = idx[i];
            JT_FAIL(JT_TAPE);
        }
        goto done;
    }
    JT_NEXT();
    {
        int in_object = (tape[stack[depth - 1]] >> 56) == '{';
        if (c == ',') {
            if (in_object) goto object_key;
            JT_NEXT();
            goto value;
        }
        if (c == (in_object ? '}' : ']')) {
            JT_CLOSE(c);
            goto after_value;
        }
        JT_FAIL(JT_TAPE);
    }

done:
    tape[t] = JT_WORD('r', 0);
    tape[0] = JT_WORD('r', t);
    *tape_len = t + 1;
    *str_len = s;
    return JT_SUCCESS;
#undef JT_NEXT
#undef JT_FAIL
#undef JT_CLOSE
}

#endif
