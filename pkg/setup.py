import os
import platform

from Cython.Build import cythonize
from setuptools import Extension, setup

# -march=native picks up AVX2/PCLMUL where present; JSONTAPE_PORTABLE=1 builds
# the scalar kernels only (for wheels or older CPUs).
if os.environ.get("JSONTAPE_PORTABLE") == "1" or platform.machine() not in ("x86_64", "AMD64"):
    arch_flags = []
else:
    arch_flags = ["-march=native"]

extensions = [
    Extension(
        "jsontape._core",
        ["src/jsontape/_core.pyx"],
        include_dirs=["src/jsontape"],
        extra_compile_args=["-O3", *arch_flags],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
