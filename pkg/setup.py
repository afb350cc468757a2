import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RATECERT_SKIP_NATIVE") != "1":
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "ratecert._native",
                ["src/ratecert/_native.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
