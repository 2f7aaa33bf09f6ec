"""Entanglement detection from moments of randomized local measurements."""

from .errors import NumericalError, UsageError
from .qmat import DensityMatrix

__version__ = "0.1.0"

__all__ = ["DensityMatrix", "NumericalError", "UsageError", "__version__"]
