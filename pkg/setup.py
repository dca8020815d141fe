import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext = Extension(
        "qldyn._kernels._core",
        sources=["src/qldyn/_kernels/_core.pyx", "src/qldyn/_kernels/kern.c"],
        include_dirs=[numpy.get_include(), "src/qldyn/_kernels"],
        extra_compile_args=["-O3", "-march=native",
                            "-mprefer-vector-width=512"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
    ext_modules = cythonize([ext], language_level=3)

setup(ext_modules=ext_modules)
