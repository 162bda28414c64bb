"""regglab: exact counting, sampling, spectra, and coupling for regular graph ensembles."""

from .kernels import BACKEND
from .rng import SeedSpec

__version__ = "0.1.0"

__all__ = ["BACKEND", "SeedSpec", "__version__"]
