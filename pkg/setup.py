"""Build script: compiles the Cython kernel extension when Cython is available.

The package is fully functional without the extension — ``uafkit._backend``
falls back to the pure-NumPy kernels at import time — so a missing compiler
or Cython install degrades gracefully instead of failing the build.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/uafkit/_kernels_cy.pyx",
        language_level=3,
    )
    for ext in ext_modules:
        ext.extra_compile_args = ["-O3"]
except ImportError:
    pass

setup(ext_modules=ext_modules)
