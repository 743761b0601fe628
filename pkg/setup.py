"""Optional compiled kernel build.

The package is pure Python plus one optional Cython extension holding the
Lie-group ODE stepping kernel. If Cython or a C compiler is unavailable the
install proceeds without it and the numpy fallback is used at import time.
"""
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/pathtrans/_kernels/_core.pyx"],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs = include_dirs
except Exception as exc:  # pragma: no cover - environment dependent
    sys.stderr.write("pathtrans: building without compiled kernel (%s)\n" % exc)
    ext_modules = []

setup(ext_modules=ext_modules)
