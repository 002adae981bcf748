"""Roughness response functions: deviation of the exact response from the PFA.

``rho(k) = G(k) / G(0)`` measures how much the second-order roughness response
at lateral wavevector ``k`` exceeds the PFA value ``G(0) = E''/2``.  Only its
asymptotes are available in closed form here:

* large ``k`` (``k >> omega_P/c, 1/L``): ``rho = alpha k`` with the slope
  ``alpha`` from a double integral over the cavity modes (:func:`alpha`);
* perfect reflectors (``lambda_P -> 0``): full ``G(k)`` from a double integral
  over incident and diffracted wavevectors (:func:`g_perfect`), with
  ``rho -> k L / 3`` for ``k L >> 1``.

The response at intermediate ``k`` for a real plasma mirror is not computed;
:func:`rho_estimate` stitches the asymptotes into a heuristic estimate.

Reduced responses are ``G L^5 / (hbar c A)``; the prefactor uses ``hbar c`` so
that ``G`` has the energy/area dimensions demanded by
``delta E = int d^2k/(4 pi^2) G(k) sigma(k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.polynomial import Chebyshev

from .lifshitz import IDEAL_G0, canonical_kp, curvature_ratio, plasma_breakpoints, reduced_g0
from .mirror import DomainError, Mirror, loop_function, te_reflection, tm_reflection
from .quadrature import integrate_nested_many, integrate_triangle

__all__ = [
    "Model",
    "ResponseSample",
    "Q_PFA",
    "Q_ASYMPTOTIC",
    "alpha",
    "high_k_slope",
    "g_perfect",
    "g_perfect_many",
    "rho_perfect_interp",
    "rho_perfect",
    "rho_high_k",
    "rho_estimate",
    "rho",
    "response_ratio",
]

Q_PFA = 1e-3
"""Below this q the perfect-reflector response is replaced by its PFA limit."""
Q_ASYMPTOTIC = 50.0
"""Above this q the perfect-reflector response is replaced by ``-pi^2 q/360``."""


class Model(str, Enum):
    PFA = "pfa"
    HIGH_K = "high_k"
    PERFECT_REFLECTOR = "perfect_reflector"
    STITCHED = "stitched"


@dataclass(frozen=True)
class ResponseSample:
    k: float
    q: float
    rho: float
    model: Model
    g_reduced: float | None = None


def _tm_bracket(K, Omega, K_P):
    """``[2(K^2-W^2)^2 - K_t^2(2K^2-3W^2)] / [(K K_t)^2 - (K^2-W^2)^2]``."""
    w2 = np.square(Omega)
    k2 = np.square(K)
    kp2 = K_P * K_P
    den = k2 * kp2 + w2 * (2.0 * k2 - w2)
    if np.any(den <= 0):
        raise DomainError("TM bracket denominator not positive; Omega > K?")
    num = w2 * (2.0 * w2 - k2) - kp2 * (2.0 * k2 - 3.0 * w2)
    return num / den


def _alpha_integrand(K_P: float):
    kp2 = K_P * K_P

    def f(K, Omega):
        rte, cte = te_reflection(K, K_P)
        rtm, ctm = tm_reflection(K, Omega, K_P)
        fte = loop_function(rte, K, cte)
        ftm = loop_function(rtm, K, ctm)
        weight = kp2 / (2.0 * np.square(Omega) + kp2)
        return K * K * weight * (fte + _tm_bracket(K, Omega, K_P) * ftm)
    return f


@lru_cache(maxsize=4096)
def alpha(K_P: float, rel_tol: float = 1e-8) -> float:
    """High-k slope ``alpha / L`` of ``rho = alpha k`` for reduced plasma wavevector ``K_P``.

    Tends to 0.4492 for ``K_P -> 0`` and to ``14 / (15 K_P)`` for ``K_P -> inf``.
    """
    if not (K_P > 0 and math.isfinite(K_P)):
        raise DomainError(f"alpha needs finite K_P > 0, got {K_P}")
    res = integrate_triangle(_alpha_integrand(K_P), rel_tol,
                             points=plasma_breakpoints(K_P))
    return res.value / (4.0 * math.pi ** 2 * reduced_g0(K_P))


def high_k_slope(K_P: float) -> float:
    """Slope of the large-q law ``rho = slope * q``.

    For a perfect mirror ``k >> omega_P / c`` is never reached and the
    large-q law is the perfect-reflector one, ``rho = q / 3``.
    """
    if math.isinf(K_P):
        return 1.0 / 3.0
    return alpha(K_P)


def _g_perfect_integrand(K, Kp, q):
    bose = np.exp(-2.0 * K) / -np.expm1(-2.0 * K)
    s = np.square(K) + np.square(Kp) - np.square(q)
    num = np.square(K * Kp) + 0.25 * np.square(s)
    return bose * num / -np.expm1(-2.0 * Kp)


def g_perfect_many(q, rel_tol: float = 1e-8) -> np.ndarray:
    """Vectorised :func:`g_perfect`; all quadratures run as one batch."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if np.any(np.isnan(q)) or np.any(q < 0):
        raise DomainError("q must be >= 0")
    out = np.where(q < Q_PFA, IDEAL_G0, -math.pi ** 2 * q / 360.0)
    mid = (q >= Q_PFA) & (q <= Q_ASYMPTOTIC)
    if mid.any():
        qm = q[mid]
        # the lower limit |K - q| has a kink at K = q
        vals, _ = integrate_nested_many(
            _g_perfect_integrand, lambda K, p: np.abs(K - p), lambda K, p: K + p,
            qm, rel_tol, outer_points=(lambda p: p,))
        out[mid] = -vals / (4.0 * math.pi ** 2 * qm)
    return out


@lru_cache(maxsize=16384)
def g_perfect(q: float, rel_tol: float = 1e-8) -> float:
    """Reduced response ``G(k) L^5 / (hbar c A)`` of perfect mirrors at ``q = k L``.

    Equals ``-pi^2/120`` at ``q = 0`` and tends to ``-pi^2 q / 360``; the
    analytic limits are returned below ``Q_PFA`` and above ``Q_ASYMPTOTIC``.
    """
    if math.isnan(q) or q < 0:
        raise DomainError(f"q must be >= 0, got {q}")
    return float(g_perfect_many([q], rel_tol)[0])


def rho_perfect(q: float, rel_tol: float = 1e-8) -> float:
    """``G(q)/G(0)`` for perfect mirrors."""
    return g_perfect(q, rel_tol) / IDEAL_G0


_TABLE_EDGES = (Q_PFA, 0.03, 0.3, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, Q_ASYMPTOTIC)
_TABLE_DEGREE = 20


@lru_cache(maxsize=1)
def _rho_perfect_table() -> tuple[Chebyshev, ...]:
    nodes = np.polynomial.chebyshev.chebpts1(_TABLE_DEGREE + 1)
    edges = np.asarray(_TABLE_EDGES)
    a, b = edges[:-1, None], edges[1:, None]
    q = 0.5 * (a + b) + 0.5 * (b - a) * nodes[None, :]
    values = g_perfect_many(q.ravel(), 1e-11).reshape(q.shape) / IDEAL_G0
    return tuple(Chebyshev.fit(q[i], values[i], _TABLE_DEGREE, domain=[a[i, 0], b[i, 0]])
                 for i in range(q.shape[0]))


def rho_perfect_interp(q) -> np.ndarray:
    """``rho_perfect`` from a piecewise Chebyshev table built once per process.

    Used inside spectral integrals, where thousands of evaluations are
    needed; agrees with :func:`rho_perfect` to better than 1e-9.
    """
    q = np.asarray(q, dtype=float)
    if np.any(q < 0):
        raise DomainError("q must be >= 0")
    out = np.where(q < Q_PFA, 1.0, q / 3.0)
    mid = (q >= Q_PFA) & (q <= Q_ASYMPTOTIC)
    if np.any(mid):
        pieces = _rho_perfect_table()
        qm = q[mid]
        which = np.clip(np.searchsorted(_TABLE_EDGES, qm, side="right") - 1,
                        0, len(pieces) - 1)
        vals = np.empty_like(qm)
        for i, piece in enumerate(pieces):
            sel = which == i
            if sel.any():
                vals[sel] = piece(qm[sel])
        out[mid] = vals
    return out


def rho_high_k(k: float, L: float, mirror: Mirror, rel_tol: float = 1e-8) -> float:
    """Large-k law ``rho = alpha k``; only meaningful for ``k >> max(2 pi/lambda_P, 1/L)``."""
    if not k >= 0:
        raise DomainError(f"k must be >= 0, got {k}")
    return high_k_slope(canonical_kp(L, mirror)) * k * L


def rho_estimate(k: float, L: float, mirror: Mirror, rel_tol: float = 1e-8) -> ResponseSample:
    """Heuristic stitched estimate of ``rho`` at arbitrary ``k``.

    This is a lower envelope of the known asymptotes, not the exact response:

        rho ~ max(1, alpha k, rho_perfect(min(k, omega_P/c) L))

    The PFA floor holds for ``k -> 0``; the perfect-reflector shape is used
    only up to the plasma wavevector ``omega_P/c`` beyond which plates stop
    reflecting perfectly; the high-k law takes over at large ``k``.
    """
    if not k >= 0:
        raise DomainError(f"k must be >= 0, got {k}")
    kp = canonical_kp(L, mirror)
    q = k * L
    value = max(1.0, high_k_slope(kp) * q, rho_perfect(min(q, kp), rel_tol))
    return ResponseSample(k, q, value, Model.STITCHED, None)


def rho(k: float, L: float, mirror: Mirror, model: Model | str,
        rel_tol: float = 1e-8) -> ResponseSample:
    """``rho(k)`` under the chosen response model, with the reduced ``G`` attached."""
    model = Model(model)
    if not k >= 0:
        raise DomainError(f"k must be >= 0, got {k}")
    kp = canonical_kp(L, mirror)
    q = k * L
    if model is Model.PFA:
        value = 1.0
    elif model is Model.HIGH_K:
        value = high_k_slope(kp) * q
    elif model is Model.PERFECT_REFLECTOR:
        value = rho_perfect(q, rel_tol)
    else:
        value = rho_estimate(k, L, mirror, rel_tol).rho
    return ResponseSample(k, q, value, model, reduced_g0(kp) * value)


def response_ratio(k: float, L: float, mirror: Mirror, model: Model | str,
                   rel_tol: float = 1e-8) -> float:
    """``G(k) / E_PP`` in nm^-2 (positive: both are negative)."""
    sample = rho(k, L, mirror, model, rel_tol)
    return curvature_ratio(canonical_kp(L, mirror)) * sample.rho / (L * L)
