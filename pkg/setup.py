import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "signstream.features._kernels",
        ["src/signstream/features/_kernels.pyx"],
        include_dirs=[np.get_include()],
        # -ffp-contract=off keeps the kernel bitwise identical to the numpy
        # reference (FMA contraction would perturb the cosine dot products).
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

if cythonize is not None:
    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})
else:
    ext_modules = []

# The package works without the extension (the numpy encoder is selected at
# import time), so a failed build must not fail the install.
for ext in ext_modules:
    ext.optional = True

setup(ext_modules=ext_modules)
