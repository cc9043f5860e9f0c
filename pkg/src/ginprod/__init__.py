"""Eigenvalue statistics of products of independent complex Ginibre matrices."""

__version__ = "0.1.0"

from .errors import (ConfigurationError, ConvergenceError, DomainError, GinprodError,
                     NumericalError, StatisticsError)
from .kernel import KernelContext, finite_size_density
from .limits import LimitModels
from .sampler import GinibreSpec, SpectrumSample, sample_spectra
from .weight import WeightEvaluator

__all__ = [
    "ConfigurationError", "ConvergenceError", "DomainError", "GinprodError",
    "NumericalError", "StatisticsError", "KernelContext", "finite_size_density",
    "LimitModels", "GinibreSpec", "SpectrumSample", "sample_spectra", "WeightEvaluator",
]
