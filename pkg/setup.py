"""Build script: compiles the optional jet-kernel extension.

The package is fully functional without the extension (a pure-Python
implementation of the same kernels is selected at import time), so any
failure to cythonize or compile downgrades to a pure-Python install
instead of aborting.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/tailkit/_kernels.pyx"],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"tailkit: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
