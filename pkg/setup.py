from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("crawlsim.kernels._core", ["src/crawlsim/kernels/_core.pyx"])],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    # Without Cython the package still works through the pure-Python kernels.
    extensions = []

setup(ext_modules=extensions, zip_safe=False)

# Build the extension in-place for development: python setup.py build_ext --inplace
