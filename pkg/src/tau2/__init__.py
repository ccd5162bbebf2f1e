"""Numerical toolkit for the quantum τ₂ model with open non-diagonal boundaries."""

from .weyl_model import ModelConfig, SiteParams, ConfigError
from .rk_matrices import BoundaryParams

__version__ = "0.1.0"

__all__ = ["ModelConfig", "SiteParams", "BoundaryParams", "ConfigError", "__version__"]
