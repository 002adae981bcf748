"""Brute-force reference computations.

These deliberately share nothing with the adaptive path: integrals are plain
trapezoid sums on uniform grids, and the reflection coefficients are written
in their textbook form (the TM coefficient with its ``K_P^2/Omega^2`` term,
patched by its limit on the ``Omega = 0`` grid line).  The triangle
``0 <= Omega <= K`` is mapped to a rectangle with ``Omega = u K``.

Also here: Gaussian random rough surfaces synthesised from a spectrum, used
to check the spectrum moments statistically.
"""

from __future__ import annotations

import math

import numpy as np

from .constants import HBAR_C, NM
from .spectra import RoughnessSpectrum, correlation_length, sigma

__all__ = [
    "trapezoid_energy",
    "trapezoid_g0",
    "trapezoid_alpha",
    "trapezoid_g_perfect",
    "synthesize_surface",
    "radial_periodogram",
    "golden_values",
    "GOLDEN_GRID",
]

GOLDEN_GRID = {"n_K": 6144, "n_Omega": 1536, "K_max": 30.0}
"""Grid used for the frozen golden values in the test fixtures."""

_CHUNK = 256


def _weights(n: int, h: float) -> np.ndarray:
    w = np.full(n + 1, h)
    w[0] = w[-1] = 0.5 * h
    return w


def _literal_reflection(K, Omega, K_P):
    """Textbook plasma-model coefficients; ``K_P = inf`` gives the perfect mirror."""
    if math.isinf(K_P):
        one = np.ones(np.broadcast(K, Omega).shape)
        return -one, one
    kt = np.sqrt(K * K + K_P * K_P)
    rte = -(kt - K) / (kt + K)
    with np.errstate(divide="ignore", invalid="ignore"):
        eps_k = (1.0 + K_P ** 2 / (Omega * Omega)) * K
        rtm = (eps_k - kt) / (eps_k + kt)
    rtm = np.where(Omega == 0, 1.0, rtm)
    return rte * np.ones_like(rtm), rtm


def _rect_sum(fn, K_P: float, n_K: int, n_Omega: int, K_max: float) -> float:
    """Trapezoid sum of ``K * fn(K, Omega)`` over the wedge, via ``Omega = u K``."""
    if n_K < 16 or n_Omega < 16:
        raise ValueError("need at least 16 grid intervals per axis")
    if K_max < 20:
        raise ValueError("K_max must be >= 20")
    K = np.linspace(0.0, K_max, n_K + 1)
    u = np.linspace(0.0, 1.0, n_Omega + 1)
    wK = _weights(n_K, K_max / n_K)
    wu = _weights(n_Omega, 1.0 / n_Omega)
    total = 0.0
    # the K = 0 grid line carries zero weight in every integrand used here
    for start in range(1, n_K + 1, _CHUNK):
        kk = K[start:start + _CHUNK, None]
        vals = fn(kk, u[None, :] * kk, K_P) * kk
        total += float(wK[start:start + _CHUNK] @ (vals @ wu))
    return total


def _log_sum(fn, K_P: float, n_K: int, n_Omega: int, K_max: float,
             K_min: float = 1e-8, u_min: float = 1e-10) -> float:
    """Trapezoid sum of ``K * fn(K, Omega)`` over the wedge on uniform grids in
    ``ln K`` and ``ln(Omega / K)``.

    Resolves the plasma scales ``K ~ K_P`` and ``Omega / K ~ K_P / K`` at any
    ``K_P``; the strips ``K < K_min`` and ``Omega < u_min K`` are dropped, which
    costs ``O(K_min^2)`` and ``O(u_min)`` relative for the integrands used here.
    """
    if n_K < 16 or n_Omega < 16:
        raise ValueError("need at least 16 grid intervals per axis")
    if K_max < 20:
        raise ValueError("K_max must be >= 20")
    t = np.linspace(math.log(K_min), math.log(K_max), n_K + 1)
    s = np.linspace(math.log(u_min), 0.0, n_Omega + 1)
    K = np.exp(t)
    u = np.exp(s)
    wK = _weights(n_K, t[1] - t[0]) * K          # dK = K dt
    wu = _weights(n_Omega, s[1] - s[0]) * u      # du = u ds
    total = 0.0
    for start in range(0, n_K + 1, _CHUNK):
        kk = K[start:start + _CHUNK, None]
        vals = fn(kk, u[None, :] * kk, K_P) * kk
        total += float(wK[start:start + _CHUNK] @ (vals @ wu))
    return total


def _energy_density(K, Omega, K_P):
    rte, rtm = _literal_reflection(K, Omega, K_P)
    x = np.exp(-2.0 * K)
    return K * (np.log1p(-rte ** 2 * x) + np.log1p(-rtm ** 2 * x))


def _g0_density(K, Omega, K_P):
    rte, rtm = _literal_reflection(K, Omega, K_P)
    x = np.exp(-2.0 * K)
    out = 0.0
    for r in (rte, rtm):
        f = r * r * x / (1.0 - r * r * x)
        out = out + f * (1.0 + f)
    return K ** 3 * out


def _alpha_density(K, Omega, K_P):
    rte, rtm = _literal_reflection(K, Omega, K_P)
    x = np.exp(-2.0 * K)
    fte = rte ** 2 * x / (1.0 - rte ** 2 * x)
    ftm = rtm ** 2 * x / (1.0 - rtm ** 2 * x)
    kt2 = K * K + K_P * K_P
    d = K * K - Omega * Omega
    bracket = (2.0 * d ** 2 - kt2 * (2.0 * K * K - 3.0 * Omega ** 2)) / (K * K * kt2 - d ** 2)
    weight = K_P ** 2 / (2.0 * Omega ** 2 + K_P ** 2)
    return K * K * weight * (fte + bracket * ftm)


def trapezoid_energy(K_P: float, n_K: int = 2048, n_Omega: int = 512,
                     K_max: float = 30.0) -> float:
    """Reduced plane-plane energy by a uniform trapezoid sum (``math.inf``: perfect mirror)."""
    return _rect_sum(_energy_density, K_P, n_K, n_Omega, K_max) / (4.0 * math.pi ** 2)


def trapezoid_g0(K_P: float, n_K: int = 2048, n_Omega: int = 512,
                 K_max: float = 30.0) -> float:
    """``G(0) L^5/(hbar c A)`` from the distance derivative taken under the integral.

    With ``x = r^2 exp(-2 kappa L)`` and ``r`` independent of ``L``,
    ``d^2/dL^2 ln(1 - x) = -4 kappa^2 f (1 + f)`` where ``f = x / (1 - x)``.
    """
    return -_rect_sum(_g0_density, K_P, n_K, n_Omega, K_max) / (2.0 * math.pi ** 2)


def trapezoid_alpha(K_P: float, n: int = 2048, K_max: float = 30.0,
                    n_Omega: int | None = None) -> float:
    """High-k slope ``alpha/L`` with both integrals as trapezoid sums.

    For ``K_P < 1`` the plasma weight ``K_P^2 / (2 Omega^2 + K_P^2)`` switches
    off at ``Omega ~ K_P``, below any practical uniform spacing, so the sums
    run on logarithmic grids; otherwise on the uniform grid used for the energy.
    """
    if not (K_P > 0 and math.isfinite(K_P)):
        raise ValueError("K_P must be finite and positive")
    if K_P < 1.0:
        m = n_Omega or max(16, n // 2)
        summer = _log_sum
    else:
        m = n_Omega or max(16, n // 4)
        summer = _rect_sum
    integral = summer(_alpha_density, K_P, n, m, K_max)
    g0 = -summer(_g0_density, K_P, n, m, K_max) / (2.0 * math.pi ** 2)
    return integral / (4.0 * math.pi ** 2 * g0)


def trapezoid_g_perfect(q: float, n_K: int = 4096, n_t: int = 512,
                        K_max: float = 30.0) -> float:
    """Perfect-reflector response ``G(q) L^5/(hbar c A)`` by trapezoid sums.

    The inner variable is ``K' = |K - q| + t (K + q - |K - q|)``, ``t in [0, 1]``.
    """
    if not q > 0:
        raise ValueError("q must be positive")
    K = np.linspace(0.0, K_max, n_K + 1)
    t = np.linspace(0.0, 1.0, n_t + 1)
    wK = _weights(n_K, K_max / n_K)
    wt = _weights(n_t, 1.0 / n_t)
    total = 0.0
    for start in range(1, n_K + 1, _CHUNK):
        kk = K[start:start + _CHUNK, None]
        lo = np.abs(kk - q)
        width = kk + q - lo
        kp = lo + t[None, :] * width
        num = (kk * kp) ** 2 + 0.25 * (kk ** 2 + kp ** 2 - q * q) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            inner = num / (1.0 - np.exp(-2.0 * kp))
        inner = np.where(kp == 0, 0.0, inner)
        bose = np.exp(-2.0 * kk) / (1.0 - np.exp(-2.0 * kk))
        total += float(wK[start:start + _CHUNK] @ ((inner @ wt) * width[:, 0] * bose[:, 0]))
    return -total / (4.0 * math.pi ** 2 * q)


def synthesize_surface(spec: RoughnessSpectrum, grid_n: int, grid_step: float,
                       seed: int) -> np.ndarray:
    """Zero-mean Gaussian random height field (nm) on a periodic ``grid_n**2`` grid.

    White noise is filtered by ``sqrt(sigma(|k|)) / grid_step`` in Fourier
    space, so the expected variance is ``sum_k sigma(k) / (N dx)^2 ~ a^2``.
    The ``k = 0`` mode is removed, making the sample mean exactly zero.
    """
    if grid_n < 2 or grid_n & (grid_n - 1):
        raise ValueError(f"grid_n must be a power of two, got {grid_n}")
    l_c = correlation_length(spec)
    if grid_n * grid_step < 10.0 * l_c:
        raise ValueError(f"domain {grid_n * grid_step:g} nm is too small for l_c = {l_c:g} nm")
    if grid_step > l_c:
        raise ValueError(f"grid step {grid_step:g} nm does not resolve l_c = {l_c:g} nm")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((grid_n, grid_n))
    k1 = 2.0 * math.pi * np.fft.fftfreq(grid_n, d=grid_step)
    kabs = np.hypot(k1[:, None], k1[None, :])
    filt = np.sqrt(sigma(spec, kabs)) / grid_step
    filt[0, 0] = 0.0
    return np.real(np.fft.ifft2(np.fft.fft2(noise) * filt))


def radial_periodogram(h: np.ndarray, grid_step: float, bins: np.ndarray):
    """Ring-averaged spectrum estimate ``|FFT h|^2 dx^2 / N^2`` in the given k bins.

    Returns ``(bin_centres, estimate, counts)``.
    """
    n = h.shape[0]
    power = np.abs(np.fft.fft2(h)) ** 2 * grid_step ** 2 / n ** 2
    k1 = 2.0 * math.pi * np.fft.fftfreq(n, d=grid_step)
    kabs = np.hypot(k1[:, None], k1[None, :]).ravel()
    idx = np.digitize(kabs, bins) - 1
    ok = (idx >= 0) & (idx < len(bins) - 1)
    counts = np.bincount(idx[ok], minlength=len(bins) - 1)
    sums = np.bincount(idx[ok], power.ravel()[ok], minlength=len(bins) - 1)
    with np.errstate(invalid="ignore"):
        est = sums / counts
    return 0.5 * (bins[:-1] + bins[1:]), est, counts


def golden_values() -> dict:
    """Reference values frozen into the test fixtures, with the grids used."""
    g = GOLDEN_GRID
    gold = 136.0
    kp200 = 2.0 * math.pi * 200.0 / gold
    kp100 = 2.0 * math.pi * 100.0 / gold

    def energy(kp):
        return trapezoid_energy(kp, g["n_K"], g["n_Omega"], g["K_max"])

    def g0(kp):
        return trapezoid_g0(kp, g["n_K"], g["n_Omega"], g["K_max"])

    def alpha(kp):
        return trapezoid_alpha(kp, g["n_K"], g["K_max"], g["n_Omega"])

    e200 = energy(kp200)
    e_per_area = HBAR_C / (200.0 * NM) ** 3 * e200
    ratio100 = g0(kp100) / energy(kp100)
    alpha100 = alpha(kp100)
    q100 = 0.05 * 100.0
    rho_perfect_kp100 = trapezoid_g_perfect(kp100, 6144, 1024) / (-math.pi ** 2 / 120.0)
    values = {
        "reduced_energy": {"K_P": 62.832, "value": energy(62.832)},
        "reduced_energy_gold_L200": {"K_P": kp200, "value": e200},
        "energy_per_area_gold_L200": {"L_nm": 200.0, "lambda_p_nm": gold,
                                      "value_J_per_m2": e_per_area},
        "plane_sphere_force_gold_L200_R100um": {
            "L_nm": 200.0, "R_nm": 1e5, "lambda_p_nm": gold,
            "value_N": 2.0 * math.pi * 1e5 * NM * e_per_area},
        "alpha_gold_L200": {"K_P": kp200, "value": alpha(kp200)},
        "g_perfect_q1": {"q": 1.0, "value": trapezoid_g_perfect(1.0, 6144, 1024)},
        "g_perfect_q6": {"q": 6.0, "value": trapezoid_g_perfect(6.0, 6144, 1024)},
        "response_ratio_gold_L100_k0.05": {
            "L_nm": 100.0, "lambda_p_nm": gold, "k_nm_inv": 0.05,
            "high_k_nm2": ratio100 * alpha100 * q100 / 100.0 ** 2,
            "stitched_nm2": ratio100 * max(1.0, alpha100 * q100, rho_perfect_kp100) / 100.0 ** 2,
        },
    }
    return {"grid": dict(g), "g_perfect_grid": {"n_K": 6144, "n_t": 1024, "K_max": 30.0},
            "values": values}
