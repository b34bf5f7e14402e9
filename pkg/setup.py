"""Build script: compiles the optional speedups extension when Cython is present.

The package is fully functional without the extension; crglimits.backend
falls back to the pure-Python kernels at import time.  Set CRGLIMITS_NO_EXT=1
to skip the build explicitly.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("CRGLIMITS_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "crglimits._speedups",
                    sources=["src/crglimits/_speedups.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
