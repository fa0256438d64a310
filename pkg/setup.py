"""Build the optional compiled kernels; the package falls back to pure Python without them."""
import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    import gmpy2
except ImportError:  # pragma: no cover - build without the extension
    ext_modules = []
else:
    gmpy2_dir = os.path.dirname(gmpy2.__file__)
    ext_modules = cythonize(
        [
            Extension(
                "cubicsum._kernels",
                ["src/cubicsum/_kernels.pyx"],
                include_dirs=[gmpy2_dir],
                libraries=["mpfr", "gmp"],
                extra_compile_args=["-O2"],
            )
        ],
        include_path=[os.path.dirname(gmpy2_dir)],
        language_level=3,
    )

setup(ext_modules=ext_modules)
