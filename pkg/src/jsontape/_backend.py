"""Backend selection.

The compiled core is used when it imports; otherwise the pure-Python
modules do the work. ``JSONTAPE_BACKEND=python`` forces the fallback.
Both backends expose the same four calls and must return identical
results.
"""

from __future__ import annotations

import os
import time

from . import indexer, tape, utf8
from .indexer import PaddedInput
from .minify import minify_python

try:
    from . import _core
except ImportError:  # not built; the pure-Python path still works
    _core = None


class PythonBackend:
    name = "python"

    @staticmethod
    def structural_index(padded: PaddedInput, *, clmul=True, naive_extract=False, naive_classify=False):
        return indexer.build_structural_index(
            padded, clmul=clmul, naive_extract=naive_extract, naive_classify=naive_classify
        )

    @staticmethod
    def build_tape(padded: PaddedInput, index):
        return tape.build_tape(padded, index)

    @classmethod
    def parse(cls, padded: PaddedInput, *, clmul=True, naive_extract=False, naive_classify=False, timings=None):
        t0 = time.perf_counter_ns()
        index = cls.structural_index(
            padded, clmul=clmul, naive_extract=naive_extract, naive_classify=naive_classify
        )
        t1 = time.perf_counter_ns()
        result = tape.build_tape(padded, index)
        if timings is not None:
            timings += [t1 - t0, time.perf_counter_ns() - t1]
        return result

    @staticmethod
    def validate_utf8(data) -> bool:
        return utf8.validate_utf8(bytes(data))

    @staticmethod
    def minify(padded: PaddedInput) -> bytes:
        return minify_python(padded)


class CompiledBackend:
    def __init__(self, use_simd: bool = True):
        self.use_simd = use_simd
        self.name = "compiled" if use_simd else "compiled-scalar"

    def structural_index(self, padded: PaddedInput, *, clmul=True, naive_extract=False, naive_classify=False):
        return _core.structural_index(
            padded.data, padded.length, clmul, naive_extract, naive_classify, self.use_simd
        )

    def build_tape(self, padded: PaddedInput, index):
        return _core.build_tape(padded.data, index, padded.length, self.use_simd)

    def parse(self, padded: PaddedInput, *, clmul=True, naive_extract=False, naive_classify=False, timings=None):
        return _core.parse(
            padded.data, padded.length, clmul, naive_extract, naive_classify, self.use_simd, timings
        )

    def validate_utf8(self, data) -> bool:
        return _core.validate_utf8(data, self.use_simd)

    def minify(self, padded: PaddedInput) -> bytes:
        return _core.minify(padded.data, padded.length, self.use_simd)


_BACKENDS = {"python": PythonBackend()}
if _core is not None:
    _BACKENDS["compiled"] = CompiledBackend()
    # scalar C kernels, handy for checking the SIMD ones
    _BACKENDS["compiled-scalar"] = CompiledBackend(use_simd=False)


def available_backends() -> list[str]:
    return list(_BACKENDS)


def get_backend(name: str | None = None):
    if name is None:
        return DEFAULT
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {available_backends()}") from None


def _pick_default():
    wanted = os.environ.get("JSONTAPE_BACKEND")
    if wanted:
        return get_backend(wanted)
    return _BACKENDS.get("compiled", _BACKENDS["python"])


DEFAULT = _pick_default()
