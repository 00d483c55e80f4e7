"""Build script: compiles the optional jet-arithmetic extension.

The package works without the extension (a pure-numpy backend is selected at
import time), so any failure to build it degrades to a warning instead of
aborting the install.  Set INCOMPAT_NO_EXT=1 to skip the extension on purpose.
"""

import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("INCOMPAT_NO_EXT", "0") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/incompat/_jetcore.pyx"],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except Exception as exc:  # cython missing or cythonize failed
        print(f"warning: skipping compiled jet kernels ({exc})", file=sys.stderr)
        ext_modules = []

setup(ext_modules=ext_modules)
