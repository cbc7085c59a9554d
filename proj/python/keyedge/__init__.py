"""Keyedge-ratio geometry for monocular 3D box depth and yaw."""

from ._keyedge import *  # noqa: F401,F403
from ._keyedge import KeyedgeError

__all__ = [name for name in dir() if not name.startswith("_")]
