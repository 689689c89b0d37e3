from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext_modules = [
    Pybind11Extension(
        "gfmi._core",
        sorted(
            [
                "src/bindings.cpp",
                "src/control.cpp",
                "src/io.cpp",
                "src/optimize.cpp",
                "src/plant.cpp",
                "src/simloop.cpp",
            ]
        ),
        include_dirs=["include"],
        cxx_std=20,
    ),
]

setup(ext_modules=ext_modules, cmdclass={"build_ext": build_ext})
