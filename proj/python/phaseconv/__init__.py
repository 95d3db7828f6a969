"""Blind deconvolutional phase retrieval: lifted convex program and ADMM solver."""

from ._phaseconv import *  # noqa: F401,F403
from ._phaseconv import __doc__  # noqa: F401

__version__ = "0.1.0"
