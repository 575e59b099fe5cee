from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off keeps the compiled kernels bit-identical to the
# pure-Python mirror (no fused multiply-adds).
ext = Extension(
    "amdim._kernels",
    ["src/amdim/_kernels.pyx"],
    extra_compile_args=["-O3", "-ffp-contract=off"],
)

setup(ext_modules=cythonize([ext], language_level=3))
