import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("MTCRELAY_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "mtcrelay._ckernels",
                    ["src/mtcrelay/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    # keep IEEE semantics so tie-breaking matches the numpy fallback
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
