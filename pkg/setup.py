from setuptools import setup, Extension

import numpy

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "chitin._kernels._core",
                ["src/chitin/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-python fallback in chitin._kernels covers everything; the
    # extension only accelerates the hot loops.
    ext_modules = []

setup(ext_modules=ext_modules)
