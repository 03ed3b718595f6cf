"""Build script for the optional Cython speedup extension.

The package works without the extension (a pure numpy fallback is selected
at import time); building it just makes the hot kernels much faster.
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "stackforge._kernels._speedups",
                ["src/stackforge/_kernels/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                language="c++",
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
