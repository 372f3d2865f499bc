from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "qoslab._qoslab",
    sources=[
        "bindings/module.cpp",
        "src/rate_control.cpp",
        "src/rtcp.cpp",
        "src/media.cpp",
        "src/trace.cpp",
        "src/netem.cpp",
        "src/config.cpp",
        "src/simcore.cpp",
        "src/metrics.cpp",
    ],
    include_dirs=["include", "vendor"],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
