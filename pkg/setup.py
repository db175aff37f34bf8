from setuptools import Extension, setup

# The SAT core is optional: rcterm.satsolver falls back to the pure-Python
# propagation loop when the compiled module is absent.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("rcterm._satcore", ["src/rcterm/_satcore.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
