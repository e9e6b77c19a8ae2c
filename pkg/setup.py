from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "endoring._kernel_c",
                ["src/endoring/_kernel_c.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython at build time: install the pure-Python package; the import-time
    # backend selection in endoring.backend falls back automatically.
    extensions = []

setup(ext_modules=extensions)
