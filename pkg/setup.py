"""Builds the optional compiled kernel extension.

The package works without it: kcut.kernels falls back to the NumPy
implementation when the extension is missing or KCUT_NO_EXTENSION=1.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("KCUT_NO_EXTENSION") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "kcut._kernels",
                    ["src/kcut/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
