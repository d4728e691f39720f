"""Sieve analysis of two-arm failure-type tables."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, InfeasibleError, InputError, NumericalError, SnlError  # noqa: F401
