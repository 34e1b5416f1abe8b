import os

from setuptools import Extension, setup

# The compiled assignment kernel is optional: when Cython (or a C compiler)
# is unavailable the package falls back to the pure-Python twin at import.
ext_modules = []
if not os.environ.get("BKMATCH_PURE_PYTHON"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "bkmatch.assignment._core",
                    ["src/bkmatch/assignment/_core.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
