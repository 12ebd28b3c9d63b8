"""Hypothesis tests for verifying maximally entangled states."""

from ._entbench import *  # noqa: F401,F403
from ._entbench import EntbenchError

__version__ = "0.1.0"
