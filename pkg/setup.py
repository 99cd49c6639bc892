"""Build hook for the optional compiled kernels.

The package is pure Python except for spclab._speedups, which accelerates
the two Monte Carlo reductions.  If Cython or a C compiler is missing the
extension is skipped and the NumPy fallback in spclab._purekernels is used.
"""

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    extensions = cythonize(
        [
            Extension(
                "spclab._speedups",
                ["src/spclab/_speedups.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except Exception:
    extensions = []

setup(ext_modules=extensions)
