from setuptools import setup

# The compiled kernel is optional: the package falls back to the pure-Python
# kernels in dynbicon._pykernels when the extension is missing.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/dynbicon/_ckernels.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
