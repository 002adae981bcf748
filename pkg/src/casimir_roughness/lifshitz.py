"""Plane-plane Casimir energy of two plasma-model mirrors at zero temperature.

The energy per unit area is written ``E_PP / A = (hbar c / L**3) e(K_P)`` with
the reduced energy

    e(K_P) = 1/(4 pi^2) int_0^inf dK K int_0^K dOmega
             sum_{TE,TM} ln(1 - r_p^2 exp(-2K)),

which reduces to ``-pi^2/720`` for perfect mirrors.  Distance derivatives are
taken at fixed plasma wavelength, i.e. of ``x -> e(K_P x) / x**3`` at ``x = 1``.

Lengths are in nm throughout; physical outputs are SI (J/m^2, N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .constants import HBAR_C, NM
from .mirror import DomainError, Mirror, log_round_trip_gap, te_reflection, tm_reflection
from .quadrature import first_derivative, integrate_triangle, second_derivative

__all__ = [
    "GeometrySpec",
    "ReducedEnergy",
    "PlaneSphereForce",
    "IDEAL_ENERGY",
    "IDEAL_G0",
    "reduced_energy",
    "reduced_g0",
    "reduced_energy_slope",
    "curvature_ratio",
    "energy_per_area",
    "pfa_g0",
    "pfa_curvature_ratio",
    "plane_sphere_force",
    "canonical_kp",
    "plasma_breakpoints",
]

IDEAL_ENERGY = -math.pi ** 2 / 720.0
IDEAL_G0 = -math.pi ** 2 / 120.0

DIFF_STEP = 1e-3
"""Base finite-difference step, relative to L."""

_ENERGY_TOL_FOR_DERIVATIVES = 1e-12


@dataclass(frozen=True)
class GeometrySpec:
    """Plate separation ``L`` (nm), plate area ``A`` (nm^2), optional sphere radius ``R`` (nm)."""

    L: float
    A: float = 1.0
    R: float | None = None

    def __post_init__(self) -> None:
        if not self.L > 0:
            raise DomainError(f"L must be positive, got {self.L}")
        if not self.A > 0:
            raise DomainError(f"A must be positive, got {self.A}")
        if self.R is not None and not self.R > 0:
            raise DomainError(f"R must be positive, got {self.R}")


@dataclass(frozen=True)
class ReducedEnergy:
    e: float
    error_estimate: float


@dataclass(frozen=True)
class PlaneSphereForce:
    force: float
    warnings: tuple[str, ...] = field(default=())


def canonical_kp(L: float, mirror: Mirror) -> float:
    """Reduced plasma wavevector, rounded to 13 significant digits.

    The rounding makes ``(L, lambda_P)`` and ``(s L, s lambda_P)`` map to the
    same float, so reduced quantities are exactly scale invariant.
    """
    if not L > 0:
        raise DomainError(f"L must be positive, got {L}")
    kp = mirror.k_p(L)
    return kp if math.isinf(kp) else float(f"{kp:.13g}")


def _energy_integrand(K_P: float):
    if math.isinf(K_P):
        def f(K, Omega):
            return 2.0 * K * np.log(-np.expm1(-2.0 * K)) + 0.0 * Omega
    else:
        def f(K, Omega):
            rte, cte = te_reflection(K, K_P)
            rtm, ctm = tm_reflection(K, Omega, K_P)
            return K * (log_round_trip_gap(rte, K, cte)
                        + log_round_trip_gap(rtm, K, ctm))
    return f


def plasma_breakpoints(K_P: float) -> tuple[float, ...]:
    """Break points resolving the plasma scale in both K and Omega."""
    if math.isinf(K_P):
        return ()
    return tuple(p for p in (0.1 * K_P, K_P, 10.0 * K_P, 100.0 * K_P) if p < 30.0)


@lru_cache(maxsize=4096)
def reduced_energy(K_P: float, rel_tol: float = 1e-10) -> ReducedEnergy:
    """Reduced plane-plane energy ``e(K_P)``; ``math.inf`` selects perfect mirrors.

    >>> round(reduced_energy(math.inf).e / IDEAL_ENERGY, 9)
    1.0
    """
    if math.isnan(K_P) or K_P < 0:
        raise DomainError(f"K_P must be >= 0, got {K_P}")
    if K_P == 0:
        return ReducedEnergy(0.0, 0.0)
    res = integrate_triangle(_energy_integrand(K_P), rel_tol,
                             points=plasma_breakpoints(K_P))
    scale = 1.0 / (4.0 * math.pi ** 2)
    return ReducedEnergy(res.value * scale, res.abs_error_estimate * scale)


def _scaled_energy(K_P: float):
    def F(x: float) -> float:
        kp = K_P if math.isinf(K_P) else K_P * x
        return reduced_energy(kp, _ENERGY_TOL_FOR_DERIVATIVES).e / x ** 3
    return F


@lru_cache(maxsize=4096)
def reduced_g0(K_P: float) -> float:
    """``G(0) L^5 / (hbar c A) = L^5 E''_PP / (2 hbar c A)`` at fixed plasma wavelength."""
    if math.isnan(K_P) or K_P <= 0:
        raise DomainError(f"K_P must be > 0, got {K_P}")
    return 0.5 * second_derivative(_scaled_energy(K_P), 1.0, DIFF_STEP)


@lru_cache(maxsize=4096)
def reduced_energy_slope(K_P: float) -> float:
    """``L^4 E'_PP / (hbar c A)`` at fixed plasma wavelength."""
    if math.isnan(K_P) or K_P <= 0:
        raise DomainError(f"K_P must be > 0, got {K_P}")
    return first_derivative(_scaled_energy(K_P), 1.0, DIFF_STEP)


def curvature_ratio(K_P: float) -> float:
    """``L^2 E''/(2E)``: 3 for K_P -> 0, 6 for perfect mirrors."""
    e = reduced_energy(K_P, _ENERGY_TOL_FOR_DERIVATIVES).e
    return reduced_g0(K_P) / e


def energy_per_area(L: float, mirror: Mirror, rel_tol: float = 1e-10) -> float:
    """Plane-plane Casimir energy per unit area in J/m^2 (negative)."""
    kp = canonical_kp(L, mirror)
    return HBAR_C / (L * NM) ** 3 * reduced_energy(kp, rel_tol).e


def pfa_g0(L: float, mirror: Mirror, rel_tol: float = 1e-10) -> float:
    """Reduced PFA response ``G(0) L^5/(hbar c A)``; depends on L only through K_P."""
    return reduced_g0(canonical_kp(L, mirror))


def pfa_curvature_ratio(L: float, mirror: Mirror, rel_tol: float = 1e-10) -> float:
    """Prefactor of ``a^2/L^2`` in the PFA roughness correction."""
    return curvature_ratio(canonical_kp(L, mirror))


def plane_sphere_force(L: float, R: float, mirror: Mirror, rel_tol: float = 1e-10,
                       l_c: float | None = None) -> PlaneSphereForce:
    """PFA sphere-plane force ``2 pi R E_PP/A`` in N, with validity warnings.

    ``l_c`` (nm), when given, enables the check that the sphere's nearly flat
    patch holds many roughness correlation areas.
    """
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    force = 2.0 * math.pi * R * NM * energy_per_area(L, mirror, rel_tol)
    warnings = []
    if R < 10.0 * L:
        warnings.append(f"R = {R:g} nm is not >> L = {L:g} nm; PFA sphere mapping is inaccurate")
    if l_c is not None and R * L < 10.0 * l_c ** 2:
        warnings.append(f"R L = {R * L:g} nm^2 is not >> l_c^2 = {l_c ** 2:g} nm^2; "
                        "too few correlation areas under the sphere")
    return PlaneSphereForce(force, tuple(warnings))
