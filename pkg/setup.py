"""Build the optional compiled kernel core.

The package works without it: ``divisor_moments.kernels`` falls back to the
numpy implementation when the extension is missing.
"""
from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:  # build the pure-Python package only
    pass
else:
    ext_modules = cythonize(
        [
            Extension(
                "divisor_moments._kernels",
                ["src/divisor_moments/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
