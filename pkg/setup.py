"""Build script: compiles the optional Cython kernel for the Lobachevsky function.

The package is fully functional without the extension (a numpy fallback is
selected at import), so a failed compile downgrades to a pure build instead
of aborting the install.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "hyperideal._lob_cy",
                ["src/hyperideal/_lob_cy.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - exercised only on broken toolchains
    print(f"hyperideal: skipping Cython extension ({exc}); using pure-python kernels")

setup(ext_modules=ext_modules)
