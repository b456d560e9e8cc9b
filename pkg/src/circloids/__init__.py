"""Rasterized rotation theory on the annulus and torus: digital topology of
annular continua (circloids, cores, spikes, generators), rotation number and
rotation set estimation, and explicit semiconjugacies to circle rotations."""

__version__ = "0.1.0"

from .grid import GridSpec, RasterSet
from .errors import *  # noqa: F401,F403
