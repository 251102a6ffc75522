"""CMake-backed build for the _core extension module.

The C++ build is owned by CMakeLists.txt; this shim configures it, builds
only the extension target, and drops the resulting module where setuptools
expects it.
"""

import shutil
import subprocess
import sys
from pathlib import Path

import pybind11
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                str(source_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DABIL_BUILD_TESTS=OFF",
                "-DABIL_BUILD_PYTHON=ON",
                f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
                f"-DPython_EXECUTABLE={sys.executable}",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            cwd=build_dir,
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_core", "--parallel"],
            cwd=build_dir,
            check=True,
        )

        staged = build_dir / "python_pkg" / "andreev_billiards"
        modules = sorted(staged.glob("_core*.so")) + sorted(staged.glob("_core*.pyd"))
        if not modules:
            raise RuntimeError(f"no built _core module under {staged}")
        dest = Path(self.get_ext_fullpath(ext.name)).resolve()
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(modules[0], dest)


setup(
    packages=["andreev_billiards"],
    package_dir={"": "python"},
    ext_modules=[CMakeExtension("andreev_billiards._core")],
    cmdclass={"build_ext": CMakeBuild},
    zip_safe=False,
)
