"""Python bindings for the mergo library."""

from ._mergo import *  # noqa: F401,F403
from ._mergo import __version__  # noqa: F401
