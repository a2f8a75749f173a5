"""Optional Cython build for the hot kernels.

The package works without the extension (a numpy fallback is selected at
import time), so any build failure here downgrades to a warning instead of
aborting the install.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/kcolorlab/_kernels.pyx",
        compiler_directives={"language_level": "3"},
    )
    include_dirs = [numpy.get_include()]
except Exception as exc:  # Cython or numpy missing at build time
    warnings.warn(f"building without compiled kernels: {exc}")
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
