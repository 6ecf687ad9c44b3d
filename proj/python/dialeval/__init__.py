"""Python bindings for the dialeval pipeline."""

from ._dialeval import *  # noqa: F401,F403
from ._dialeval import __version__  # noqa: F401
