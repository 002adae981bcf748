"""Isotropic roughness spectra.

``sigma(k)`` is the summed spectrum ``sigma_11 + sigma_22`` of both plates
(cross-correlations between the plates are not modelled), in nm^4 for ``k``
in nm^-1.  The roughness variance is its moment

    a^2 = int d^2k / (4 pi^2) sigma(k) = (1 / 2 pi) int_0^inf k sigma(k) dk.

Measured spectra are read from a two-column CSV file::

    k_nm_inv,sigma_nm4
    # comments start with '#'
    0.001,1.2e5
    ...
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .mirror import DomainError
from .quadrature import integrate_semi_infinite

__all__ = [
    "GaussianSpectrum",
    "TabulatedSpectrum",
    "RoughnessSpectrum",
    "SpectrumParseError",
    "CSV_HEADER",
    "sigma",
    "variance",
    "correlation_length",
    "load_spectrum",
    "parse_spectrum",
]

CSV_HEADER = ("k_nm_inv", "sigma_nm4")


class SpectrumParseError(ValueError):
    """Malformed spectrum file or spectrum string."""


@dataclass(frozen=True)
class GaussianSpectrum:
    """``sigma(k) = a^2 pi l_c^2 exp(-k^2 l_c^2 / 4)`` with variance ``a2`` (nm^2)."""

    a2: float
    l_c: float

    def __post_init__(self) -> None:
        if not self.a2 > 0:
            raise DomainError(f"a2 must be positive, got {self.a2}")
        if not self.l_c > 0:
            raise DomainError(f"l_c must be positive, got {self.l_c}")


@dataclass(frozen=True)
class TabulatedSpectrum:
    """Sampled spectrum, linearly interpolated and zero outside the samples."""

    k: tuple[float, ...]
    sigma: tuple[float, ...]

    def __post_init__(self) -> None:
        k = np.asarray(self.k, dtype=float)
        s = np.asarray(self.sigma, dtype=float)
        if k.ndim != 1 or k.shape != s.shape or k.size < 2:
            raise DomainError("need at least two (k, sigma) samples of equal length")
        if k[0] < 0 or np.any(np.diff(k) <= 0):
            raise DomainError("k samples must be non-negative and strictly increasing")
        if np.any(s < 0) or not np.all(np.isfinite(s)):
            raise DomainError("sigma samples must be finite and non-negative")
        object.__setattr__(self, "k", tuple(float(x) for x in k))
        object.__setattr__(self, "sigma", tuple(float(x) for x in s))


RoughnessSpectrum = Union[GaussianSpectrum, TabulatedSpectrum]


def sigma(spec: RoughnessSpectrum, k):
    """Spectrum value(s) at wavevector ``k`` (nm^-1)."""
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr < 0):
        raise DomainError("k must be >= 0")
    if isinstance(spec, GaussianSpectrum):
        out = spec.a2 * math.pi * spec.l_c ** 2 * np.exp(-np.square(k_arr * spec.l_c) / 4.0)
    else:
        out = np.interp(k_arr, spec.k, spec.sigma, left=0.0, right=0.0)
    return out if np.ndim(out) else float(out)


def variance(spec: RoughnessSpectrum, rel_tol: float = 1e-10) -> float:
    """Roughness variance ``a^2`` in nm^2.

    Gaussian spectra are integrated numerically in ``u = k l_c``; tabulated
    spectra integrate the piecewise-linear interpolant exactly.
    """
    if isinstance(spec, GaussianSpectrum):
        res = integrate_semi_infinite(lambda u: u * np.exp(-u * u / 4.0), rel_tol)
        return 0.5 * spec.a2 * res.value
    k = np.asarray(spec.k)
    s = np.asarray(spec.sigma)
    k0, k1, s0, s1 = k[:-1], k[1:], s[:-1], s[1:]
    # int_{k0}^{k1} k (s0 + (s1 - s0)(k - k0)/(k1 - k0)) dk
    seg = (k1 - k0) * (s0 * (2 * k0 + k1) + s1 * (k0 + 2 * k1)) / 6.0
    return float(seg.sum() / (2.0 * math.pi))


def correlation_length(spec: RoughnessSpectrum) -> float:
    """Inverse spectral width, ``2 / sqrt(<k^2>)`` with weight ``k sigma(k)``.

    Exactly ``l_c`` for the Gaussian model.
    """
    if isinstance(spec, GaussianSpectrum):
        return spec.l_c
    k = np.asarray(spec.k)
    w = k * np.asarray(spec.sigma)
    # trapezoid on the sample grid is adequate for a width estimate
    norm = np.trapezoid(w, k)
    if norm <= 0:
        return math.inf
    return 2.0 / math.sqrt(np.trapezoid(w * k * k, k) / norm)


def load_spectrum(path: str | Path) -> TabulatedSpectrum:
    """Read a ``k_nm_inv,sigma_nm4`` CSV file; errors name the offending line."""
    ks: list[float] = []
    ss: list[float] = []
    header_seen = False
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            cells = [c.strip() for c in row]
            if not header_seen:
                if tuple(cells) != CSV_HEADER:
                    raise SpectrumParseError(
                        f"{path}:{lineno}: expected header {','.join(CSV_HEADER)}")
                header_seen = True
                continue
            if len(cells) != 2:
                raise SpectrumParseError(f"{path}:{lineno}: expected two columns")
            try:
                k, s = float(cells[0]), float(cells[1])
            except ValueError:
                raise SpectrumParseError(f"{path}:{lineno}: non-numeric value") from None
            if not (math.isfinite(k) and math.isfinite(s)):
                raise SpectrumParseError(f"{path}:{lineno}: non-finite value")
            if k < 0:
                raise SpectrumParseError(f"{path}:{lineno}: negative k")
            if s < 0:
                raise SpectrumParseError(f"{path}:{lineno}: negative sigma")
            if ks and k == ks[-1]:
                raise SpectrumParseError(f"{path}:{lineno}: duplicate k {k:g}")
            if ks and k < ks[-1]:
                raise SpectrumParseError(f"{path}:{lineno}: k out of order")
            ks.append(k)
            ss.append(s)
    if not header_seen:
        raise SpectrumParseError(f"{path}: empty file")
    if len(ks) < 2:
        raise SpectrumParseError(f"{path}: need at least two samples")
    return TabulatedSpectrum(tuple(ks), tuple(ss))


def parse_spectrum(text: str) -> GaussianSpectrum:
    """Parse ``gaussian:a=<nm>,lc=<nm>`` where ``a`` is the rms roughness.

    >>> parse_spectrum("gaussian:a=5,lc=60")
    GaussianSpectrum(a2=25.0, l_c=60.0)
    """
    kind, _, args = text.partition(":")
    if kind.strip().lower() != "gaussian":
        raise SpectrumParseError(f"unknown spectrum kind {kind!r}; expected 'gaussian'")
    values: dict[str, float] = {}
    for item in args.split(","):
        key, eq, val = item.partition("=")
        if not eq:
            raise SpectrumParseError(f"malformed spectrum parameter {item!r}")
        try:
            values[key.strip()] = float(val)
        except ValueError:
            raise SpectrumParseError(f"non-numeric value in {item!r}") from None
    if set(values) != {"a", "lc"}:
        raise SpectrumParseError("gaussian spectrum needs exactly a=<nm>,lc=<nm>")
    try:
        return GaussianSpectrum(values["a"] ** 2, values["lc"])
    except DomainError as exc:
        raise SpectrumParseError(str(exc)) from None
