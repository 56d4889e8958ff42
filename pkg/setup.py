"""Builds the optional compiled kernels.

    python setup.py build_ext --inplace

Without Cython or a C compiler the package installs with the numpy fallback.
"""
from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("timdof._kernels_c", ["src/timdof/_kernels_c.pyx"],
                   include_dirs=[numpy.get_include()],
                   define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                   extra_compile_args=["-O2", "-ffp-contract=off"])],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
