import warnings

from setuptools import setup


def _extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        warnings.warn("Cython/numpy missing: installing the pure-Python kernels only")
        return []
    ext = Extension("macfusion._kernels", ["src/macfusion/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")])
    return cythonize([ext], language_level=3)


setup(ext_modules=_extensions())
