"""Build script for the optional compiled scan kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time); set COURSEAIDE_NO_EXT=1 to skip compilation.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, etc.
            print(f"warning: skipping compiled kernel ({exc}); using numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); using numpy fallback")


extensions = []
if not os.environ.get("COURSEAIDE_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        extensions = cythonize(
            [
                Extension(
                    "courseaide.knowledge._simscan",
                    ["src/courseaide/knowledge/_simscan.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError as exc:
        print(f"warning: Cython/numpy unavailable ({exc}); building without compiled kernel")

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
