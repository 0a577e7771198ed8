"""Splitting integrators for a PID-controlled rigid vessel.

Thin wrapper over the C++ library. States cross the boundary as numpy arrays
in the layout omega(3), q(4), v(3), x(3), phi_theta(3), phi_x(3).
"""

from ._core import *  # noqa: F401,F403
from ._core import Method, __doc__  # noqa: F401

STATE_DIM = 19

__all__ = [name for name in dir() if not name.startswith("_")]
