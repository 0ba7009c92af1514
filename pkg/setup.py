"""Build script for the optional compiled kernels.

The Cython extension ``optodistill._kernels`` is optional: if Cython or a C
compiler is unavailable the package installs without it and falls back to
``optodistill._kernels_py`` at import time.
"""
import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("OPTODISTILL_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "optodistill._kernels",
                    ["src/optodistill/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
