"""Builds the dfrc_py extension by delegating to cargo.

The extension is a pyo3 cdylib; cargo produces libdfrc_py.so and this
shim drops it into place under the Python extension filename.
"""

import pathlib
import shutil
import subprocess

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

CRATE_DIR = pathlib.Path(__file__).parent.resolve()


class CargoBuildExt(build_ext):
    def build_extension(self, ext):
        target_dir = pathlib.Path(self.build_temp).resolve() / "cargo"
        subprocess.run(
            [
                "cargo",
                "build",
                "--release",
                "--manifest-path",
                str(CRATE_DIR / "Cargo.toml"),
                "--target-dir",
                str(target_dir),
            ],
            check=True,
        )
        built = target_dir / "release" / "libdfrc_py.so"
        dest = pathlib.Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(built, dest)


setup(
    ext_modules=[Extension("dfrc_py", sources=[])],
    cmdclass={"build_ext": CargoBuildExt},
)
