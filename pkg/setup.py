"""Builds the optional compiled kernels; without Cython the package installs pure Python."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("CRITNODE_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            ["src/critnode/_ckernels.pyx"],
            compiler_directives={"language_level": "3"},
            quiet=True,
        )

setup(ext_modules=ext_modules)
