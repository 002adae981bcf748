"""Plasma-model mirrors at imaginary frequency.

All quantities are in the cavity's reduced variables: ``K`` is the imaginary
z-wavevector times ``L``, ``Omega`` the imaginary frequency times ``L/c`` and
``K_P = omega_P L / c = 2 pi L / lambda_P``.  Propagating vacuum modes at
imaginary frequency satisfy ``K >= Omega >= 0``.

Functions accept scalars or numpy arrays and broadcast.  The TM coefficient is
evaluated in a cleared-denominator form that stays finite at ``Omega = 0``;
``1 - r**2`` is carried alongside ``r`` so that cavity denominators near the
perfect-reflection corner do not suffer cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "DomainError",
    "MirrorSpec",
    "PerfectMirror",
    "Mirror",
    "mirror_from_lambda",
    "ReducedPoint",
    "k_t",
    "r_te",
    "r_tm",
    "loop_function",
    "te_reflection",
    "tm_reflection",
    "round_trip_gap",
    "log_round_trip_gap",
]


class DomainError(ValueError):
    """Argument outside the domain where a response formula is defined."""


@dataclass(frozen=True)
class MirrorSpec:
    """Plasma-model metal, characterised by its plasma wavelength in nm."""

    lambda_p: float

    def __post_init__(self) -> None:
        if not (self.lambda_p > 0 and math.isfinite(self.lambda_p)):
            raise DomainError(f"lambda_p must be positive and finite, got {self.lambda_p}")

    perfect = False

    def k_p(self, L: float) -> float:
        """Reduced plasma wavevector ``2 pi L / lambda_P`` for separation ``L`` (nm)."""
        return 2.0 * math.pi * L / self.lambda_p


@dataclass(frozen=True)
class PerfectMirror:
    """Perfect reflector: ``r_TE = -1`` and ``r_TM = +1`` at every frequency."""

    perfect = True
    lambda_p = 0.0

    def k_p(self, L: float) -> float:
        return math.inf


Mirror = Union[MirrorSpec, PerfectMirror]


def mirror_from_lambda(lambda_p: float) -> Mirror:
    """``lambda_p == 0`` selects the perfect mirror, anything else the plasma model."""
    if lambda_p == 0:
        return PerfectMirror()
    return MirrorSpec(float(lambda_p))


def k_t(K, K_P):
    """z-wavevector inside the metal, ``sqrt(K**2 + K_P**2)``."""
    return np.hypot(K, K_P)


def te_reflection(K, K_P):
    """Return ``(r_TE, 1 - r_TE**2)``."""
    K = np.asarray(K, dtype=float)
    kt = np.hypot(K, K_P)
    s = kt + K
    if np.any(s == 0):
        raise DomainError("r_TE undefined at K = K_P = 0")
    return -(np.square(K_P) / np.square(s)), 4.0 * K * kt / np.square(s)


def tm_reflection(K, Omega, K_P):
    """Return ``(r_TM, 1 - r_TM**2)`` in the form that is regular at ``Omega = 0``."""
    K = np.asarray(K, dtype=float)
    w2 = np.square(Omega)
    kp2 = np.square(K_P)
    kt = np.hypot(K, K_P)
    a = (w2 + kp2) * K
    b = w2 * kt
    den = a + b
    if np.any(den == 0):
        raise DomainError("r_TM undefined at K = Omega = 0")
    # a - b = K_P^2 [K (K_t + K) - Omega^2] / (K_t + K), free of cancellation
    r = kp2 * (K * (kt + K) - w2) / ((kt + K) * den)
    # exact limit on Omega = 0, and no rounding above 1 just beside it
    r = np.where(w2 == 0, 1.0, np.minimum(r, 1.0))
    return r, 4.0 * (a / den) * (b / den)


def r_te(K, K_P):
    """TE reflection coefficient ``-(K_t - K)/(K_t + K)``, in ``(-1, 0]``."""
    return te_reflection(K, K_P)[0]


def r_tm(K, Omega, K_P):
    """TM reflection coefficient, in ``[0, 1)`` and equal to 1 at ``Omega = 0``."""
    return tm_reflection(K, Omega, K_P)[0]


def round_trip_gap(r, K, one_minus_r2=None):
    """``1 - r**2 exp(-2K)``, evaluated without cancellation."""
    r2 = np.square(r)
    c = 1.0 - r2 if one_minus_r2 is None else one_minus_r2
    return c - r2 * np.expm1(-2.0 * np.asarray(K, dtype=float))


def log_round_trip_gap(r, K, one_minus_r2=None):
    """``ln(1 - r**2 exp(-2K))``, accurate both for small and near-unit ``r**2 e^{-2K}``."""
    x = np.square(r) * np.exp(-2.0 * np.asarray(K, dtype=float))
    gap = round_trip_gap(r, K, one_minus_r2)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x < 0.5, np.log1p(-x), np.log(gap))


def loop_function(r, K, one_minus_r2=None):
    """Cavity loop function ``r**2 e^{-2K} / (1 - r**2 e^{-2K})``.

    >>> float(loop_function(-1.0, math.log(2) / 2))
    1.0
    """
    gap = round_trip_gap(r, K, one_minus_r2)
    if np.any(gap <= 0):
        raise DomainError("loop function pole: r**2 exp(-2K) >= 1")
    return np.square(r) * np.exp(-2.0 * np.asarray(K, dtype=float)) / gap


@dataclass(frozen=True)
class ReducedPoint:
    """A single (K, Omega) sample for a mirror with reduced plasma wavevector K_P."""

    K: float
    Omega: float
    K_P: float

    def __post_init__(self) -> None:
        if not (self.K >= self.Omega >= 0):
            raise DomainError(f"need K >= Omega >= 0, got K={self.K}, Omega={self.Omega}")
        if not self.K_P >= 0:
            raise DomainError(f"need K_P >= 0, got {self.K_P}")

    @property
    def k_t(self) -> float:
        return float(k_t(self.K, self.K_P))

    @property
    def r_te(self) -> float:
        return float(r_te(self.K, self.K_P))

    @property
    def r_tm(self) -> float:
        return float(r_tm(self.K, self.Omega, self.K_P))
