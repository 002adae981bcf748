"""Casimir energy between plasma-model mirrors and its second-order roughness correction."""

__version__ = "0.1.0"

from .correction import CorrectionResult, Regime, classify_regime, delta, scaling_delta
from .lifshitz import (
    GeometrySpec,
    curvature_ratio,
    energy_per_area,
    plane_sphere_force,
    reduced_energy,
    reduced_g0,
)
from .mirror import DomainError, MirrorSpec, PerfectMirror, mirror_from_lambda
from .quadrature import QuadratureError, QuadratureResult
from .response import Model, alpha, g_perfect, rho, rho_estimate, rho_perfect
from .spectra import GaussianSpectrum, TabulatedSpectrum, load_spectrum, parse_spectrum, variance

__all__ = [
    "__version__",
    "CorrectionResult", "Regime", "classify_regime", "delta", "scaling_delta",
    "GeometrySpec", "curvature_ratio", "energy_per_area", "plane_sphere_force",
    "reduced_energy", "reduced_g0",
    "DomainError", "MirrorSpec", "PerfectMirror", "mirror_from_lambda",
    "QuadratureError", "QuadratureResult",
    "Model", "alpha", "g_perfect", "rho", "rho_estimate", "rho_perfect",
    "GaussianSpectrum", "TabulatedSpectrum", "load_spectrum", "parse_spectrum", "variance",
]
