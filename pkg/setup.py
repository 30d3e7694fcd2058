# Builds the compiled projector kernels. The package works without them
# (pure-numpy fallback selected at import), so a failed extension build is
# not fatal: run `pip install -e . --no-build-isolation` and check
# `python -c "import fbplearn; print(fbplearn.using_extension())"`.
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "fbplearn._kernels",
                ["src/fbplearn/_kernels.pyx"],
                extra_compile_args=["-O3", "-fopenmp"],
                extra_link_args=["-fopenmp"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
