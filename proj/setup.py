import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name, sourcedir=""):
        super().__init__(name, sources=[])
        self.sourcedir = os.fspath(Path(sourcedir).resolve())


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        ext_fullpath = Path.cwd() / self.get_ext_fullpath(ext.name)
        extdir = ext_fullpath.parent.resolve()

        cfg = "Debug" if int(os.environ.get("DEBUG", 0)) else "Release"
        cmake_args = [
            f"-DCMAKE_BUILD_TYPE={cfg}",
            f"-DPython3_EXECUTABLE={sys.executable}",
            "-DTERMMINER_BUILD_TESTS=OFF",
            "-DTERMMINER_BUILD_PYTHON=ON",
        ]

        build_temp = Path(self.build_temp) / ext.name
        build_temp.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            ["cmake", ext.sourcedir, *cmake_args], cwd=build_temp, check=True
        )
        subprocess.run(
            ["cmake", "--build", ".", "--target", "termminer_core", "--parallel"],
            cwd=build_temp,
            check=True,
        )

        # The CMake build drops the package (extension + __init__.py) into
        # <build>/python/termminer; copy it next to where setuptools expects it.
        pkg_dir = build_temp / "python" / "termminer"
        dest = extdir / "termminer"
        dest.mkdir(parents=True, exist_ok=True)
        for item in pkg_dir.iterdir():
            self.copy_file(str(item), str(dest / item.name))


setup(
    packages=["termminer"],
    package_dir={"termminer": "python/termminer"},
    ext_modules=[CMakeExtension("termminer._core")],
    cmdclass={"build_ext": CMakeBuild},
    zip_safe=False,
)
