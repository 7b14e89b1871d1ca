"""Julia-Fatou quotients, averaged quotients and the augur sandwich.

The averaged quotient of ``f`` at ``tau`` with gauges ``(kappa, lam)`` is

    A(eps) = (1/(2 eps)) int_{-eps}^{eps} Im f(tau + x + i lam(eps)) dx / kappa(lam(eps)).

It is computed either by quadrature in x (any Pick function) or, for an
explicit triple, through the arctan kernel in t:

    A(eps) = [2 eps b y + int (arctan((tau+eps-t)/y) - arctan((tau-eps-t)/y)) dmu(t)]
             / (2 eps kappa(y)),      y = lam(eps).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .errors import DivergentValue, DomainError, PreconditionError, UnsupportedError, is_divergent
from .gauges import IDENTITY, Gauge, asymptotic_class
from .measures import Measure, poisson_extension, poisson_window_integral, window_mass
from .pick import PickFunction

DIRECT_RTOL = 1e-9
METHODS = ("kernel", "direct")


def julia_fatou(f: PickFunction, kappa: Gauge, z: complex) -> float:
    """``Im f(z) / kappa(Im z)``."""
    z = complex(z)
    if z.imag <= 0:
        raise DomainError("Julia-Fatou quotient needs Im z > 0")
    k = kappa(z.imag)
    if not k > 0:
        raise DomainError("kappa vanishes at Im z")
    return f(z).imag / k


def _height(lam, eps):
    if not 0 < eps < 1:
        raise ValueError("averaged quotient needs 0 < eps < 1")
    y = lam(eps)
    if not y > 0:
        raise ValueError("lam(eps) must be positive")
    return y


def averaged_quotient_direct(f: PickFunction, kappa: Gauge, lam: Gauge, tau: float, eps: float,
                             rtol: float = DIRECT_RTOL) -> float:
    """Average of Im f over the horizontal segment, by adaptive quadrature in x."""
    y = _height(lam, eps)
    lo, hi = tau - eps, tau + eps
    pts = [p for p in f.singular_points() if lo < p < hi]
    if lo < tau < hi:
        pts.append(tau)
    integral, _ = quadrature.integrate(lambda x: f(x + 1j * y).imag, lo, hi, rtol=rtol,
                                       points=sorted(set(pts)))
    return integral / (2.0 * eps * kappa(y))


def averaged_quotient_kernel(f: PickFunction, kappa: Gauge, lam: Gauge, tau: float, eps: float) -> float:
    """Same quantity through the arctan kernel; needs an explicit (a, b, mu)."""
    t = f.triple()
    if t is None:
        raise UnsupportedError("kernel method needs a Nevanlinna triple; use the direct method")
    y = _height(lam, eps)
    total = 2.0 * eps * t.b * y + poisson_window_integral(t.mu, tau - eps, tau + eps, y)
    return total / (2.0 * eps * kappa(y))


def averaged_quotient(f, kappa, lam, tau, eps, method="kernel", rtol=DIRECT_RTOL):
    if method == "kernel":
        return averaged_quotient_kernel(f, kappa, lam, tau, eps)
    if method == "direct":
        return averaged_quotient_direct(f, kappa, lam, tau, eps, rtol)
    raise ValueError(f"unknown method {method!r}")


def dyadic_grid(eps0: float = 2.0 ** -3, count: int = 18) -> np.ndarray:
    """``eps0 * 2^-k`` for k = 0..count-1 (strictly decreasing)."""
    return eps0 * 2.0 ** -np.arange(count)


def grid_between(hi_exp: int, lo_exp: int) -> np.ndarray:
    """Dyadic grid ``2^-hi_exp, ..., 2^-lo_exp``."""
    return 2.0 ** -np.arange(hi_exp, lo_exp + 1, dtype=float)


@dataclass(frozen=True)
class QuotientSeries:
    tau: float
    kappa: Gauge
    lam: Gauge
    grid: tuple
    values: tuple
    method: str

    def __post_init__(self):
        grid = tuple(float(e) for e in self.grid)
        if len(grid) != len(self.values):
            raise ValueError("one value per grid point")
        if any(e <= 0 for e in grid) or any(b >= a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid must be positive and strictly decreasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", tuple(self.values))


def _series_point(args):
    f, kappa, lam, tau, eps, method, rtol = args
    try:
        return averaged_quotient(f, kappa, lam, tau, eps, method, rtol)
    except OverflowError:
        return DivergentValue(1.0, "overflow")


def parallel_map(fn, items, jobs=None):
    """Deterministic ordered map, in worker processes when ``jobs > 1``."""
    items = list(items)
    jobs = resolve_jobs(jobs)
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def resolve_jobs(jobs=None):
    if jobs is None:
        jobs = int(os.environ.get("NEVLAB_JOBS", "1") or 1)
    return max(1, int(jobs))


def quotient_series(f: PickFunction, kappa: Gauge, lam: Gauge, tau: float = 0.0, grid=None,
                    method: str = "kernel", jobs=None, rtol: float = DIRECT_RTOL) -> QuotientSeries:
    grid = dyadic_grid() if grid is None else np.asarray(grid, dtype=float)
    if method == "auto":
        method = "kernel" if f.triple() is not None else "direct"
    vals = parallel_map(_series_point, [(f, kappa, lam, tau, float(e), method, rtol) for e in grid], jobs)
    return QuotientSeries(tau, kappa, lam, tuple(grid), tuple(vals), method)


# -- augur inequality ------------------------------------------------------------------------

@dataclass(frozen=True)
class AugurBounds:
    eps: float
    lower: float
    upper_density_term: float
    upper_tail_term: float
    constants: tuple

    @property
    def upper(self):
        return self.upper_density_term + self.upper_tail_term

    def __post_init__(self):
        if min(self.lower, self.upper_density_term, self.upper_tail_term) < 0:
            raise ValueError("augur terms must be nonnegative")


def _require_O_t(lam):
    if not asymptotic_class(lam, IDENTITY).is_O:
        raise PreconditionError("the augur inequality needs lam = O(t)", hypothesis="lam is O(t)")


def augur_bounds(mu: Measure, b: float, kappa: Gauge, lam: Gauge, tau: float, eps: float,
                 constants) -> AugurBounds:
    """Lower and upper augur bounds at ``eps`` for given constants (L0, L1, L2)."""
    _require_O_t(lam)
    y = lam(eps)
    if y > eps:
        raise PreconditionError(f"lam(eps) = {y:g} exceeds eps = {eps:g}; take eps smaller",
                                hypothesis="lam(eps) <= eps")
    L0, L1, L2 = (float(c) for c in constants)
    k = kappa(y)
    lower = L0 * window_mass(mu, tau, eps) / (k * eps) if mu.components else 0.0
    dens = L1 * window_mass(mu, tau, 2 * eps) / (k * eps) if mu.components else 0.0
    tail = L2 * y / (k * eps * eps)
    return AugurBounds(eps, lower, dens, tail, (L0, L1, L2))


def fit_augur_constants(mu: Measure, b: float, lam: Gauge, tau: float, grid) -> tuple:
    """Explicit constants making the sandwich hold for every eps in ``grid``.

    With rho = max lam(eps)/eps over the grid and N = int dmu/(1 + (t-tau)^2):

    * L0 = arctan(2/rho)/2: inside the window the kernel is at least its edge
      value arctan(2 eps / y);
    * L1 = pi: the kernel never exceeds pi;
    * L2 = (1 + 4 eps0^2) N / 3 + b eps0^2: outside (tau-2eps, tau+2eps) the
      kernel is at most 2 eps y / (d^2 - eps^2) <= (8/3) eps y / d^2, and
      1/d^2 <= (1 + 4 eps^2) / (4 eps^2 (1 + d^2)) there; the linear term
      contributes b y = b eps^2 * y / eps^2.
    """
    _require_O_t(lam)
    grid = np.asarray(grid, dtype=float)
    eps0 = float(grid.max())
    rho = float(max(lam(e) / e for e in grid))
    L0 = 0.5 * math.atan(2.0 / rho)
    L1 = math.pi
    N = poisson_extension(mu, tau, 1.0) if mu.components else 0.0
    L2 = (1.0 + 4.0 * eps0 * eps0) * N / 3.0 + b * eps0 * eps0
    return L0, L1, L2


# -- limsup estimate -------------------------------------------------------------------------

@dataclass(frozen=True)
class CcLimEstimate:
    limsup: float
    bounded: bool
    trend: float
    heuristic: bool = True
    tail: tuple = field(default=(), repr=False)


def cc_lim_estimate(series: QuotientSeries | tuple, slope_band: float = 0.05) -> CcLimEstimate:
    """Limsup of the series as eps -> 0, read off the smaller-eps half of the grid.

    The series counts as bounded when its tail is finite and its log-log slope
    (log value against log eps) is at least ``-slope_band``.  A clearly
    positive slope means the values decay to 0.
    """
    grid, values = (series.grid, series.values) if isinstance(series, QuotientSeries) else series
    grid = np.asarray(grid, dtype=float)
    values = list(values)
    if grid.size < 8:
        raise ValueError("cc-lim estimate needs at least 8 grid points")
    if grid.max() / grid.min() < 1e3 * (1 - 1e-12):
        raise ValueError("cc-lim estimate needs a grid spanning at least 3 decades")
    order = np.argsort(-grid)
    grid = grid[order]
    values = [values[i] for i in order]
    half = grid.size // 2
    tail_eps, tail_vals = grid[half:], values[half:]
    if any(is_divergent(v) or not math.isfinite(v) for v in tail_vals):
        return CcLimEstimate(DivergentValue(1.0, "divergent tail value"), False, -math.inf, True,
                             tuple(tail_vals))
    tv = np.asarray(tail_vals, dtype=float)
    pos = tv > 0
    if pos.sum() < 2:
        return CcLimEstimate(float(max(tv.max(), 0.0)), True, 0.0, True, tuple(tail_vals))
    slope = float(np.polyfit(np.log(tail_eps[pos]), np.log(tv[pos]), 1)[0])
    bounded = slope >= -slope_band
    if not bounded:
        limsup = DivergentValue(1.0, f"log-log slope {slope:.3f}")
    elif slope > slope_band:
        limsup = 0.0
    else:
        limsup = float(tv.max())
    return CcLimEstimate(limsup, bounded, slope, True, tuple(tail_vals))
