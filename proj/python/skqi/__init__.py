"""Scaled zonal kernel quasi-interpolation on the sphere."""

from ._skqi import *  # noqa: F401,F403
from ._skqi import __version__  # noqa: F401
