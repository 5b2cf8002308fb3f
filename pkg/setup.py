"""Build script for the optional compiled kernels.

The package is pure Python plus one Cython extension holding the inner
loops (link alternation counting, Gauss-Seidel sweeps, union-find).  If
the extension cannot be built the install still succeeds and the package
falls back to the pure-Python kernels at import time.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - build without cython/numpy
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "pantscut._kernels._speedups",
                ["src/pantscut/_kernels/_speedups.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
