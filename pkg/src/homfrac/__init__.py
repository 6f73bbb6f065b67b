"""Fractional integrals with homogeneous kernels, their maximal operators,
Morrey/Orlicz norms, and a harness that checks the classical estimates on grids."""

from ._backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
