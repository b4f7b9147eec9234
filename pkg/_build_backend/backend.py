"""
Build backend shim: setuptools' backend executes ``setup.py`` as ``__main__``,
but this project's ``setup.py`` is the interactive bootstrap script (installs
requirements, runs oracle checks), not a setuptools configuration. Metadata
lives in ``pyproject.toml``, so the build runs a bare ``setup()`` instead.
"""
from setuptools import build_meta as _orig
from setuptools.build_meta import *  # noqa: F401,F403


class _Backend(_orig._BuildMetaBackend):
    def run_setup(self, setup_script: str = "setup.py") -> None:
        # A non-existent script makes setuptools fall back to ``setup()``.
        super().run_setup("__pyproject_only__.py")


_backend = _Backend()
get_requires_for_build_wheel = _backend.get_requires_for_build_wheel
get_requires_for_build_sdist = _backend.get_requires_for_build_sdist
get_requires_for_build_editable = _backend.get_requires_for_build_editable
prepare_metadata_for_build_wheel = _backend.prepare_metadata_for_build_wheel
prepare_metadata_for_build_editable = _backend.prepare_metadata_for_build_editable
build_wheel = _backend.build_wheel
build_sdist = _backend.build_sdist
build_editable = _backend.build_editable
