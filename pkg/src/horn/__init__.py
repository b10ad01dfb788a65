"""Eigenvalues of sums of random matrix orbits, and their LR counterparts."""

__version__ = "0.1.0"

__all__ = ["HornError", "DynkinWeight", "Spectrum", "make_spectrum", "__version__"]

from .errors import HornError
from .spectra import DynkinWeight, Spectrum, make_spectrum
