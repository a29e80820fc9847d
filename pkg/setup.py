"""Build script: compiles the counting kernels when a toolchain is present.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed extension build is downgraded to a warning.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any toolchain failure
            print(f"warning: extension build failed ({exc}); "
                  "falling back to pure-Python kernels", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: building {ext.name} failed ({exc}); "
                  "falling back to pure-Python kernels", file=sys.stderr)


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("warning: Cython unavailable; skipping compiled kernels",
              file=sys.stderr)
        return []
    ext = Extension(
        "matchdiff._kernels",
        ["src/matchdiff/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
