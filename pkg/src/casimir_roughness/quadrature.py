"""Adaptive quadrature and finite-difference differentiation.

Everything here works on vectorised integrands: ``f`` receives a numpy array
of abscissae (any shape) and must return an array of the same shape.  The
adaptive engine is a globally adaptive 15-point Gauss-Kronrod scheme that
refines many independent integrals in one batch, which is what makes the
nested (two-dimensional) integrals cheap enough for parameter sweeps.

Semi-infinite integrals are truncated at ``k_max`` and extended until an
estimate of the exponentially decaying tail falls below ``TAIL_FRACTION`` of
the running value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "QuadratureError",
    "QuadratureResult",
    "integrate_interval",
    "integrate_semi_infinite",
    "integrate_triangle",
    "integrate_nested",
    "integrate_nested_many",
    "second_derivative",
    "first_derivative",
]

TAIL_FRACTION = 1e-13
_EPS = np.finfo(float).eps
_MAX_ITER = 80

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_X = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG_FULL = np.zeros(15)
_WG_FULL[[1, 3, 5]] = _WG[:3]
_WG_FULL[[13, 11, 9]] = _WG[:3]
_WG_FULL[7] = _WG[3]


@dataclass(frozen=True)
class QuadratureResult:
    """Value of an integral with its absolute error estimate."""

    value: float
    abs_error_estimate: float
    evaluations: int

    def __post_init__(self) -> None:
        if not self.abs_error_estimate >= 0.0:
            raise ValueError("abs_error_estimate must be >= 0")
        if self.evaluations < 1:
            raise ValueError("evaluations must be >= 1")


class QuadratureError(RuntimeError):
    """Raised when an integral fails to converge; carries the best estimate."""

    def __init__(self, message: str, estimate: QuadratureResult | None = None):
        super().__init__(message)
        self.estimate = estimate


# Batched kernel ----------------------------------------------------------------

BatchFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _gk15(fun: BatchFn, owner: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = centre[:, None] + half[:, None] * _X[None, :]
    fv = np.asarray(fun(owner, nodes), dtype=float)
    if fv.shape != nodes.shape:
        fv = np.broadcast_to(fv, nodes.shape)
    if not np.all(np.isfinite(fv)):
        raise QuadratureError("integrand returned a non-finite value")
    resk = fv @ _WK
    resg = fv @ _WG_FULL
    resabs = np.abs(fv) @ _WK
    resasc = np.abs(fv - 0.5 * resk[:, None]) @ _WK
    val = resk * half
    ahalf = np.abs(half)
    err = np.abs((resk - resg) * half)
    resasc = resasc * ahalf
    resabs = resabs * ahalf
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc > 0) & (err > 0), scaled, err)
    err = np.maximum(err, 50.0 * _EPS * resabs)
    return val, err, resabs


def _adaptive_batch(fun: BatchFn, owner: np.ndarray, lo: np.ndarray,
                    hi: np.ndarray, n_problems: int, rel_tol: float,
                    abs_tol: float, limit: int):
    """Refine a set of interval partitions until every problem converges.

    ``owner[i]`` names the problem that interval ``[lo[i], hi[i]]`` belongs to.
    Returns ``(values, errors, resabs, evaluations, converged)`` per problem.
    """
    owner = np.asarray(owner, dtype=np.intp)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    val, err, rabs = _gk15(fun, owner, lo, hi)
    evaluations = 15 * owner.size
    converged = np.zeros(n_problems, dtype=bool)
    for _ in range(_MAX_ITER):
        total = np.bincount(owner, val, n_problems)
        etotal = np.bincount(owner, err, n_problems)
        atotal = np.bincount(owner, rabs, n_problems)
        count = np.bincount(owner, minlength=n_problems)
        tol = np.maximum(np.maximum(abs_tol, rel_tol * np.abs(total)),
                         100.0 * _EPS * atotal)
        converged = etotal <= tol
        if converged.all():
            break
        share = tol[owner] / np.maximum(count[owner], 1)
        width_ok = (hi - lo) > 64.0 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
        split = (~converged[owner]) & (err > share) & width_ok
        split &= count[owner] < limit
        if not split.any():
            break
        mid = 0.5 * (lo[split] + hi[split])
        o2 = np.concatenate([owner[split], owner[split]])
        lo2 = np.concatenate([lo[split], mid])
        hi2 = np.concatenate([mid, hi[split]])
        v2, e2, a2 = _gk15(fun, o2, lo2, hi2)
        evaluations += 15 * o2.size
        keep = ~split
        owner = np.concatenate([owner[keep], o2])
        lo = np.concatenate([lo[keep], lo2])
        hi = np.concatenate([hi[keep], hi2])
        val = np.concatenate([val[keep], v2])
        err = np.concatenate([err[keep], e2])
        rabs = np.concatenate([rabs[keep], a2])
    total = np.bincount(owner, val, n_problems)
    etotal = np.bincount(owner, err, n_problems)
    atotal = np.bincount(owner, rabs, n_problems)
    return total, etotal, atotal, evaluations, converged


def _partition(lo: np.ndarray, hi: np.ndarray, points: Sequence):
    """Initial partition of each ``[lo_i, hi_i]`` at the interior break points.

    Each entry of ``points`` is a scalar or an array with one value per problem.
    """
    owners, los, his = [], [], []
    idx = np.arange(lo.size)
    cur = lo.copy()
    if len(points):
        grid = np.stack([np.broadcast_to(np.asarray(p, dtype=float), lo.shape)
                         for p in points], axis=-1)
        grid = np.sort(grid, axis=-1)
        for j in range(grid.shape[-1]):
            p = grid[:, j]
            inside = (cur < p) & (p < hi)
            owners.append(idx[inside])
            los.append(cur[inside])
            his.append(p[inside])
            cur = np.where(inside, p, cur)
    owners.append(idx)
    los.append(cur)
    his.append(hi)
    return np.concatenate(owners), np.concatenate(los), np.concatenate(his)


def _check_tol(rel_tol: float) -> None:
    if not 0.0 < rel_tol < 1.0:
        raise ValueError(f"rel_tol must lie in (0, 1), got {rel_tol}")


# Public 1-D routines -----------------------------------------------------------

def integrate_interval(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                       rel_tol: float = 1e-8, abs_tol: float = 0.0,
                       points: Sequence[float] = (), limit: int = 2000
                       ) -> QuadratureResult:
    """Integrate ``f`` over the finite interval ``[a, b]``.

    ``points`` are interior break points (kinks, steep layers) used to seed
    the partition. Endpoints are never evaluated.
    """
    _check_tol(rel_tol)
    if b == a:
        return QuadratureResult(0.0, 0.0, 1)
    if b < a:
        r = integrate_interval(f, b, a, rel_tol, abs_tol, points, limit)
        return QuadratureResult(-r.value, r.abs_error_estimate, r.evaluations)
    owner, lo, hi = _partition(np.array([float(a)]), np.array([float(b)]), points)
    val, err, _, n, ok = _adaptive_batch(lambda _o, x: f(x), owner, lo, hi, 1,
                                         rel_tol, abs_tol, limit)
    result = QuadratureResult(float(val[0]), float(err[0]), n)
    if not ok[0]:
        raise QuadratureError(
            f"no convergence on [{a}, {b}]: value {result.value:.6g} "
            f"+/- {result.abs_error_estimate:.2g}", result)
    return result


def _tail_bound(f: Callable[[np.ndarray], np.ndarray], k: float) -> float:
    """Bound on |int_k^inf f| assuming the local exponential decay persists."""
    f0, f1 = np.abs(np.asarray(f(np.array([k - 1.0, k])), dtype=float))
    if not (np.isfinite(f0) and np.isfinite(f1)):
        raise QuadratureError("integrand returned a non-finite value")
    if f1 == 0.0:
        return 0.0
    if f0 <= f1:
        return math.inf
    return f1 / math.log(f0 / f1)


def integrate_semi_infinite(f: Callable[[np.ndarray], np.ndarray],
                            rel_tol: float = 1e-8, abs_tol: float = 0.0,
                            points: Sequence[float] = (), k_max: float = 30.0,
                            limit: int = 2000) -> QuadratureResult:
    """Integrate ``f`` over ``[0, inf)`` by truncation with a tail bound.

    The truncation point starts at ``k_max`` and doubles (at most eight times)
    until the estimated tail is below ``TAIL_FRACTION`` of the value.

    >>> round(integrate_semi_infinite(lambda k: np.exp(-2 * k)).value, 12)
    0.5
    """
    _check_tol(rel_tol)
    res = integrate_interval(f, 0.0, k_max, rel_tol, abs_tol, points, limit)
    value, error, evals = res.value, res.abs_error_estimate, res.evaluations
    upper = k_max
    for _ in range(8):
        tail = _tail_bound(f, upper)
        evals += 2
        if tail <= max(TAIL_FRACTION * abs(value), abs_tol):
            return QuadratureResult(float(value), float(error + tail), evals)
        ext = integrate_interval(f, upper, 2.0 * upper, rel_tol, abs_tol,
                                 points, limit)
        value += ext.value
        error += ext.abs_error_estimate
        evals += ext.evaluations
        upper *= 2.0
    raise QuadratureError(
        f"integrand does not decay fast enough (still significant at {upper})",
        QuadratureResult(value, error, evals))


# Nested 2-D routines -----------------------------------------------------------

def _resolve_points(points, params: np.ndarray) -> list:
    return [p(params) if callable(p) else p for p in points]


def integrate_nested_many(f: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
                          inner_lo: Callable, inner_hi: Callable, params,
                          rel_tol: float = 1e-6, outer_points: Sequence = (),
                          inner_points: Sequence = (), k_max: float = 30.0
                          ) -> tuple[np.ndarray, np.ndarray]:
    """Batch of nested integrals, one per entry of ``params``.

    Integrates ``f(K, y, p)`` over ``K in [0, inf)`` and
    ``y in [inner_lo(K, p), inner_hi(K, p)]``.  Break points are scalars or
    callables mapping the parameter array to one break point per problem;
    ``inner_points`` callables receive ``(K, p)``.
    Returns ``(values, abs_error_estimates)``.
    """
    _check_tol(rel_tol)
    params = np.atleast_1d(np.asarray(params, dtype=float))
    n = params.size
    inner_rel = rel_tol / 8.0

    def outer(owner: np.ndarray, K: np.ndarray) -> np.ndarray:
        kk = np.asarray(K, dtype=float)
        pp = (params[owner][:, None] * np.ones_like(kk)).ravel()
        kk = kk.ravel()
        lo = np.broadcast_to(np.asarray(inner_lo(kk, pp), dtype=float), kk.shape)
        hi = np.broadcast_to(np.asarray(inner_hi(kk, pp), dtype=float), kk.shape)
        ipts = [p(kk, pp) if callable(p) else p for p in inner_points]
        own, a, b = _partition(np.array(lo), np.array(hi), ipts)
        nonempty = b > a
        own, a, b = own[nonempty], a[nonempty], b[nonempty]
        out = np.zeros(kk.size)
        if own.size:
            val, _, _, _, ok = _adaptive_batch(
                lambda o, y: f(kk[o][:, None], y, pp[o][:, None]), own, a, b,
                kk.size, inner_rel, 0.0, 2000)
            if not ok.all():
                raise QuadratureError("inner integral failed to converge")
            out = val
        return out.reshape(np.shape(K))

    zeros = np.zeros(n)
    opts = _resolve_points(outer_points, params)
    owner, a, b = _partition(zeros, np.full(n, float(k_max)), opts)
    total, err, _, _, ok = _adaptive_batch(outer, owner, a, b, n, rel_tol, 0.0, 2000)
    if not ok.all():
        raise QuadratureError("outer integral failed to converge")
    upper = float(k_max)
    idx = np.arange(n)
    for _ in range(9):
        ends = outer(idx, np.column_stack([np.full(n, upper - 1.0), np.full(n, upper)]))
        f0, f1 = np.abs(ends[:, 0]), np.abs(ends[:, 1])
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = np.where(f1 == 0, 0.0,
                            np.where(f0 > f1, f1 / np.log(f0 / f1), np.inf))
        need = tail > TAIL_FRACTION * np.abs(total)
        if not need.any():
            err = err + tail
            break
        sub = idx[need]
        own2, a2, b2 = _partition(np.full(sub.size, upper),
                                  np.full(sub.size, 2.0 * upper),
                                  [np.asarray(p)[sub] if np.ndim(p) else p for p in opts])
        v2, e2, _, _, ok2 = _adaptive_batch(lambda o, K: outer(sub[o], K), own2,
                                            a2, b2, sub.size, rel_tol, 0.0, 2000)
        if not ok2.all():
            raise QuadratureError("outer integral failed to converge")
        total[sub] += v2
        err[sub] += e2
        upper *= 2.0
    else:
        raise QuadratureError("outer integrand does not decay")
    return total, err + inner_rel * np.abs(total)


def integrate_nested(f: Callable[[np.ndarray, np.ndarray], np.ndarray],
                     inner_lo: Callable[[np.ndarray], np.ndarray],
                     inner_hi: Callable[[np.ndarray], np.ndarray],
                     rel_tol: float = 1e-6, abs_tol: float = 0.0,
                     outer_points: Sequence[float] = (),
                     inner_points: Sequence[float] = (),
                     k_max: float = 30.0) -> QuadratureResult:
    """Integrate ``f(K, y)`` over ``K in [0, inf)``, ``y in [inner_lo(K), inner_hi(K)]``.

    The inner integrals for all outer nodes of a refinement step are solved
    together as one batch.
    """
    _check_tol(rel_tol)
    inner_rel = rel_tol / 8.0
    counter = [0]

    def outer(K: np.ndarray) -> np.ndarray:
        shape = np.shape(K)
        kk = np.asarray(K, dtype=float).ravel()
        lo = np.asarray(inner_lo(kk), dtype=float) * np.ones_like(kk)
        hi = np.asarray(inner_hi(kk), dtype=float) * np.ones_like(kk)
        owner, a, b = _partition(lo, hi, inner_points)
        nonempty = b > a
        owner, a, b = owner[nonempty], a[nonempty], b[nonempty]
        out = np.zeros(kk.size)
        if owner.size:
            val, _, _, n, ok = _adaptive_batch(
                lambda o, y: f(kk[o][:, None], y), owner, a, b, kk.size,
                inner_rel, 0.0, 2000)
            counter[0] += n
            if not ok.all():
                raise QuadratureError("inner integral failed to converge")
            out = val
        return out.reshape(shape)

    res = integrate_semi_infinite(outer, rel_tol, abs_tol, outer_points, k_max)
    # converged inner integrals are each good to inner_rel of their value
    err = res.abs_error_estimate + inner_rel * abs(res.value)
    return QuadratureResult(res.value, err, max(counter[0], 1))


def integrate_triangle(f: Callable[[np.ndarray, np.ndarray], np.ndarray],
                       rel_tol: float = 1e-6, abs_tol: float = 0.0,
                       points: Sequence[float] = (),
                       k_max: float = 30.0) -> QuadratureResult:
    """Integrate ``f(K, Omega)`` over the wedge ``0 <= Omega <= K < inf``.

    Outer variable ``K``, inner ``Omega``.  ``points`` are characteristic
    scales (e.g. the reduced plasma wavevector) used as break points in both
    variables.
    """
    return integrate_nested(f, lambda K: 0.0, lambda K: K, rel_tol, abs_tol,
                            points, points, k_max)


# Differentiation ---------------------------------------------------------------

def _check_step(x: float, h0: float) -> None:
    if not h0 > 0.0:
        raise ValueError(f"step must be positive, got {h0}")
    if h0 / 4.0 < 1e-6 * abs(x):
        raise ValueError(
            f"step {h0:g} underflows relative to x={x:g} for finite differences")


def second_derivative(f: Callable[[float], float], x: float, h0: float) -> float:
    """Central second difference, Richardson-extrapolated over h0, h0/2, h0/4."""
    _check_step(x, h0)
    fx = f(x)
    d = []
    for h in (h0, h0 / 2.0, h0 / 4.0):
        d.append((f(x + h) - 2.0 * fx + f(x - h)) / (h * h))
    r1 = [(4.0 * d[1] - d[0]) / 3.0, (4.0 * d[2] - d[1]) / 3.0]
    return (16.0 * r1[1] - r1[0]) / 15.0


def first_derivative(f: Callable[[float], float], x: float, h0: float) -> float:
    """Central first difference, Richardson-extrapolated over h0, h0/2, h0/4."""
    _check_step(x, h0)
    d = [(f(x + h) - f(x - h)) / (2.0 * h) for h in (h0, h0 / 2.0, h0 / 4.0)]
    r1 = [(4.0 * d[1] - d[0]) / 3.0, (4.0 * d[2] - d[1]) / 3.0]
    return (16.0 * r1[1] - r1[0]) / 15.0
