"""Relative roughness correction to the Casimir energy and force.

For two rough plates with summed spectrum ``sigma(k)`` the second-order
correction normalised by the flat-plate energy is

    Delta = delta E_PP / E_PP
          = [L^2 E''/(2E)] (1/L^2) (1/2 pi) int_0^inf k rho(k) sigma(k) dk,

and, through the PFA mapping of the sphere onto local plane-plane patches,
the same number is the relative correction of the sphere-plane force.

The module also classifies the hierarchy of ``L``, ``lambda_P`` and ``l_c``
and returns the closed-form scaling laws valid deep inside each regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .lifshitz import canonical_kp, curvature_ratio
from .mirror import Mirror
from .quadrature import integrate_interval, integrate_semi_infinite
from .response import Q_ASYMPTOTIC, Q_PFA, Model, high_k_slope, rho_perfect_interp
from .spectra import GaussianSpectrum, RoughnessSpectrum, correlation_length, variance

__all__ = [
    "Regime",
    "CorrectionResult",
    "AUTO",
    "classify_regime",
    "scaling_delta",
    "choose_model",
    "rho_values",
    "delta",
]

AUTO = "auto"


class Regime(str, Enum):
    PFA_SHORT = "PFA_short"          # L << lambda_P << l_c  (or L << l_c << lambda_P)
    PFA_LONG = "PFA_long"            # lambda_P << L << l_c
    PERFECT_ROUGH = "perfect_rough"  # lambda_P << l_c << L
    PLASMON_ROUGH = "plasmon_rough"  # l_c << L << lambda_P
    SATURATED = "saturated"          # l_c << lambda_P << L
    CROSSOVER = "crossover"


@dataclass(frozen=True)
class CorrectionResult:
    """Relative correction, equal for plane-plane energy and sphere-plane force."""

    delta: float
    model: Model
    regime: Regime
    quad_error: float
    curvature_ratio: float
    variance: float
    warnings: tuple[str, ...] = field(default=())
    closed_form: float | None = None


def classify_regime(L: float, lambda_p: float, l_c: float,
                    threshold: float = 10.0) -> Regime:
    """Label the length hierarchy; ``a << b`` means ``b >= threshold * a``.

    ``lambda_p = 0`` (perfect mirror) is smaller than every other length.
    """
    if not (L > 0 and l_c > 0 and lambda_p >= 0):
        raise ValueError("lengths must be positive (lambda_p may be 0)")

    def ll(a: float, b: float) -> bool:
        return b >= threshold * a

    if ll(L, lambda_p) and (ll(lambda_p, l_c) or ll(L, l_c)):
        return Regime.PFA_SHORT
    if ll(lambda_p, L) and ll(L, l_c):
        return Regime.PFA_LONG
    if ll(lambda_p, l_c) and ll(l_c, L):
        return Regime.PERFECT_ROUGH
    if ll(l_c, L) and ll(L, lambda_p):
        return Regime.PLASMON_ROUGH
    if ll(l_c, lambda_p) and ll(lambda_p, L):
        return Regime.SATURATED
    return Regime.CROSSOVER


def scaling_delta(regime: Regime | str, L: float, lambda_p: float, l_c: float,
                  a2: float) -> float:
    """Leading-order closed form of Delta for a Gaussian spectrum deep in ``regime``."""
    regime = Regime(regime)
    sqrt_pi = math.sqrt(math.pi)
    if regime is Regime.PFA_SHORT:
        return 3.0 * a2 / L ** 2
    if regime is Regime.PFA_LONG:
        return 6.0 * a2 / L ** 2
    if regime is Regime.PERFECT_ROUGH:
        return 2.0 * sqrt_pi * a2 / (l_c * L)
    if regime is Regime.PLASMON_ROUGH:
        return 2.7 * sqrt_pi * a2 / (l_c * L)
    if regime is Regime.SATURATED:
        return 14.0 / (5.0 * sqrt_pi) * (lambda_p / l_c) * a2 / L ** 2
    raise ValueError("no closed-form scaling law in the crossover regime")


def choose_model(L: float, lambda_p: float, l_c: float, regime: Regime,
                 threshold: float = 10.0) -> Model:
    """Response model for ``model='auto'``."""
    if l_c >= threshold * L:
        return Model.PFA
    if threshold * lambda_p <= l_c and regime in (Regime.PFA_LONG, Regime.PERFECT_ROUGH):
        return Model.PERFECT_REFLECTOR
    return Model.STITCHED


def rho_values(q: np.ndarray, K_P: float, model: Model) -> np.ndarray:
    """Vectorised ``rho`` at reduced wavevectors ``q = k L``."""
    q = np.asarray(q, dtype=float)
    if model is Model.PFA:
        return np.ones_like(q)
    if model is Model.PERFECT_REFLECTOR:
        return rho_perfect_interp(q)
    slope = high_k_slope(K_P)
    if model is Model.HIGH_K:
        return slope * q
    return np.maximum(np.maximum(1.0, slope * q), rho_perfect_interp(np.minimum(q, K_P)))


def _model_kinks(K_P: float, model: Model) -> list[float]:
    """Values of q where rho_values has a kink or a switch of evaluation branch."""
    if model in (Model.PFA, Model.HIGH_K):
        return []
    kinks = [Q_PFA, Q_ASYMPTOTIC]
    if model is Model.STITCHED:
        kinks.append(1.0 / high_k_slope(K_P))
        if math.isfinite(K_P):
            kinks.append(K_P)
    return kinks


def _validity_warnings(model: Model, L: float, lambda_p: float, l_c: float,
                       threshold: float) -> list[str]:
    k_dom = 2.0 / l_c
    out = []
    if model is Model.PFA and l_c < threshold * L:
        out.append(f"PFA needs l_c >> L; here l_c/L = {l_c / L:.3g}")
    if model is Model.HIGH_K:
        k_min = max(2.0 * math.pi / lambda_p if lambda_p > 0 else 0.0, 1.0 / L)
        if k_dom < threshold * k_min:
            out.append("high-k law needs k >> max(omega_P/c, 1/L) over the spectrum; "
                       f"dominant k = {k_dom:.3g} nm^-1 vs {k_min:.3g} nm^-1")
    if model is Model.PERFECT_REFLECTOR and lambda_p > 0 and lambda_p * k_dom > 1.0 / threshold:
        out.append("perfect-reflector response needs lambda_P << 1/k over the spectrum; "
                   f"lambda_P k = {lambda_p * k_dom:.3g}")
    if model is Model.STITCHED:
        out.append("stitched response is a heuristic envelope of the asymptotes; "
                   "intermediate-k values are estimates, not exact")
    return out


def delta(L: float, mirror: Mirror, spec: RoughnessSpectrum, model: Model | str = AUTO,
          rel_tol: float = 1e-6, threshold: float = 10.0) -> CorrectionResult:
    """Relative roughness correction ``Delta`` for separation ``L`` (nm)."""
    kp = canonical_kp(L, mirror)
    lambda_p = mirror.lambda_p
    l_c = correlation_length(spec)
    a2 = variance(spec)
    regime = (classify_regime(L, lambda_p, l_c, threshold) if math.isfinite(l_c)
              else Regime.CROSSOVER)
    chosen = (choose_model(L, lambda_p, l_c, regime, threshold) if model == AUTO
              else Model(model))
    warnings = _validity_warnings(chosen, L, lambda_p, l_c, threshold)
    ratio = curvature_ratio(kp)
    closed = (scaling_delta(regime, L, lambda_p, l_c, a2)
              if regime is not Regime.CROSSOVER and isinstance(spec, GaussianSpectrum)
              else None)
    if a2 == 0.0:
        warnings.append("spectrum has zero variance; Delta = 0")
        return CorrectionResult(0.0, chosen, regime, 0.0, ratio, 0.0,
                                tuple(warnings), closed)

    if isinstance(spec, GaussianSpectrum):
        # u = k l_c;  (1/2 pi) int k rho sigma dk = (a^2/2) int u rho(u/l_c) e^{-u^2/4} du
        l_over_lc = float(f"{L / spec.l_c:.13g}")
        points = [q / l_over_lc for q in _model_kinks(kp, chosen)]

        def integrand(u):
            return u * np.exp(-u * u / 4.0) * rho_values(u * l_over_lc, kp, chosen)

        res = integrate_semi_infinite(integrand, rel_tol, points=points)
        scale = ratio * 0.5 * spec.a2 / L ** 2
        value, error = scale * res.value, scale * res.abs_error_estimate
    else:
        k = np.asarray(spec.k)
        points = list(k[1:-1]) + [q / L for q in _model_kinks(kp, chosen)]

        def integrand(kk):
            return kk * np.interp(kk, spec.k, spec.sigma) * rho_values(kk * L, kp, chosen)

        res = integrate_interval(integrand, float(k[0]), float(k[-1]), rel_tol,
                                 points=points)
        scale = ratio / (2.0 * math.pi * L ** 2)
        value, error = scale * res.value, scale * res.abs_error_estimate
    return CorrectionResult(value, chosen, regime, error, ratio, a2,
                            tuple(warnings), closed)
