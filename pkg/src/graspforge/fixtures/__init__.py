"""Shipped fixture meshes, hand and arm models.

``GRASPFORGE_FIXTURES`` overrides the fixture root directory.
"""
import os
from pathlib import Path

PACKAGE_ROOT = Path(__file__).resolve().parent


def fixture_root() -> Path:
    env = os.environ.get("GRASPFORGE_FIXTURES")
    return Path(env) if env else PACKAGE_ROOT


def fixture_path(name: str) -> Path:
    return fixture_root() / name
