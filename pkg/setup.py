"""Build script for the optional compiled kernels.

The package is fully functional without the extension: ``fedcontract.backend``
falls back to the pure NumPy kernels when ``fedcontract._core`` is missing.
"""

import warnings

from setuptools import Extension, setup


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython is not installed; skipping the compiled kernels")
        return []
    ext = Extension("fedcontract._core", sources=["src/fedcontract/_core.pyx"])
    return cythonize([ext], language_level="3")


setup(ext_modules=_extensions())
