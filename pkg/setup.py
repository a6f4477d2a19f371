"""Build script for the compiled mode-seeking kernel.

The extension is optional: when Cython or a C compiler is unavailable the
package falls back to the pure-numpy kernel at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "mshf._modeseek",
                ["src/mshf/_modeseek.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
