import os
import sys

from setuptools import setup

ext_modules = []
if not os.environ.get("APNEAKIT_NO_EXT"):
    from Cython.Build import cythonize
    import numpy as np

    ext_modules = cythonize(
        "src/apneakit/knn/_kernels.pyx",
        compiler_directives={"language_level": sys.version_info[0]},
    )
    for ext in ext_modules:
        ext.include_dirs.append(np.get_include())

setup(ext_modules=ext_modules)
