"""Builds the nmlab_py extension module by delegating to cargo.

The build environment only ships plain setuptools, so instead of
depending on setuptools-rust this compiles the cdylib crate directly
and copies it to the extension path."""

import shutil
import subprocess
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

ROOT = Path(__file__).resolve().parent


class CargoExtension(Extension):
    def __init__(self, name, package):
        super().__init__(name, sources=[])
        self.package = package


class CargoBuildExt(build_ext):
    def build_extension(self, ext):
        subprocess.run(
            ["cargo", "build", "--release", "-p", ext.package],
            cwd=ROOT,
            check=True,
        )
        stem = ext.name.replace("-", "_")
        release = ROOT / "target" / "release"
        for candidate in (f"lib{stem}.so", f"lib{stem}.dylib", f"{stem}.dll"):
            built = release / candidate
            if built.exists():
                break
        else:
            raise FileNotFoundError(f"no built cdylib for {ext.package} in {release}")
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(built, dest)


setup(
    ext_modules=[CargoExtension("nmlab_py", "nmlab-py")],
    cmdclass={"build_ext": CargoBuildExt},
)
