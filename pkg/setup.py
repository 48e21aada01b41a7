import os

from setuptools import Extension, setup


def get_extensions():
    """Compiled kernel; empty when Cython/numpy are missing or RAMSTAT_NO_EXT=1."""
    if os.environ.get("RAMSTAT_NO_EXT") == "1":
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        print("WARNING: Cython not available; only the pure-Python kernel will be installed.")
        return []
    extensions = [
        Extension(
            "ramstat._ckernel",
            sources=["src/ramstat/_ckernel.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"],
        )
    ]
    return cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=get_extensions())
