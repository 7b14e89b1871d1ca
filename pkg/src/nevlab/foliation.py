"""Spectral classification of boundary points and related geometric probes.

A boundary point tau of a Pick function is put in one of four classes by
following ``f(tau + iy)`` down the vertical ray:

* Julia   -- a pole (``y |f| -> c > 0``) or a B-point (bounded Julia quotient,
  convergent values),
* TrueAC  -- limit with imaginary part in (0, inf),
* Crypto  -- limit that is real (Julia quotient unbounded) or infinite without a pole,
* Ethereal -- no limit (oscillation).

All of these are read off finitely many samples and are flagged heuristic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from . import quadrature
from .errors import ClassificationError, PreconditionError, SingularityError
from .gauges import (IDENTITY, ONE, Gauge, PowerLog, Tabulated, asymptotic_class, compose,
                     is_augury, order_constant, product)
from .pick import IDENTITY_MAP, MobiusMap, NegativeReciprocal, PickFunction, mobius_compose
from .quotients import cc_lim_estimate, grid_between, quotient_series

CLASSES = ("Ethereal", "Julia", "TrueAC", "Crypto")
RAY_EXPONENTS = np.arange(0, 28)          # y = 2^-k down to about 7e-9
OSCILLATION_FACTOR = 10.0
ENIGMA_GRID = (3, 20)


# -- Stolz regions --------------------------------------------------------------------------

@dataclass(frozen=True)
class StolzSpec:
    """``classical`` with aperture M in (0, 1], or ``lambda`` with gauge lam.

    For the lambda kind, ``C`` caps the admissible horizontal offset
    (infinite by default, which is the region of the definition).
    """

    kind: str
    M: float = 1.0
    lam: Gauge | None = None
    C: float = math.inf

    def __post_init__(self):
        if self.kind == "classical":
            if not 0 < self.M <= 1:
                raise ValueError("classical aperture must lie in (0, 1]")
        elif self.kind == "lambda":
            if self.lam is None:
                raise ValueError("lambda Stolz region needs a gauge")
            if not self.lam.is_increasing():
                raise ValueError("lambda Stolz regions need a monotone gauge")
            if not self.C > 0:
                raise ValueError("C must be positive")
        else:
            raise ValueError(f"unknown Stolz kind {self.kind!r}")


def classical_as_lambda(M: float) -> Gauge:
    """Gauge whose lambda-region equals the classical region of aperture M < 1."""
    if not 0 < M < 1:
        raise ValueError("need 0 < M < 1")
    return PowerLog(math.sqrt(M * M / (1 - M * M)), 1.0, 0.0)


def stolz_membership(z: complex, tau: float, spec: StolzSpec) -> bool:
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("Stolz membership needs Im z > 0")
    if spec.kind == "classical":
        return z.imag >= spec.M * abs(z - tau)
    # monotone lam: the smallest admissible C is the horizontal offset itself
    offset = abs(z.real - tau)
    if offset > spec.C:
        return False
    if offset == 0:
        return z.imag >= spec.lam.limit_at_zero() and z.imag > 0
    return z.imag >= spec.lam(offset)


# -- classification --------------------------------------------------------------------------

@dataclass
class SpectralVerdict:
    tau: float
    cls: str
    nt_limit_estimate: complex | float | None
    julia_quotient_trace: tuple
    diagnostics: str
    heuristic: bool = True
    ray: tuple = field(default=(), repr=False)

    def to_json(self):
        lim = self.nt_limit_estimate
        if lim is None:
            lim_js = None
        elif lim == math.inf:
            lim_js = "inf"
        else:
            lim_js = [complex(lim).real, complex(lim).imag]
        return {"tau": self.tau, "class": self.cls, "nt_limit": lim_js,
                "julia_quotient_trace": [float(v) for v in self.julia_quotient_trace],
                "diagnostics": self.diagnostics, "heuristic": self.heuristic}


def _slope(x, y):
    return float(np.polyfit(x, y, 1)[0])


def classify_point(f: PickFunction, tau: float = 0.0, oscillation_factor: float = OSCILLATION_FACTOR) -> SpectralVerdict:
    ys = 2.0 ** -RAY_EXPONENTS.astype(float)
    w = np.asarray(f(tau + 1j * ys), dtype=complex)
    J = w.imag / ys
    n = ys.size
    tail = slice(n // 2, n)
    yt, wt, Jt = ys[tail], w[tail], J[tail]
    trace = tuple(J)

    # pole: y |f| settles at a positive constant
    yf = yt * np.abs(wt)
    if yf[-1] > 1e-6 and np.ptp(yf[-6:]) <= 1e-3 * yf[-1]:
        return SpectralVerdict(tau, "Julia", math.inf, trace,
                               f"pole: y|f(tau+iy)| -> {yf[-1]:.6g}", True, tuple(w))

    steps = np.abs(np.diff(wt))
    scale = max(1.0, float(np.max(np.abs(wt))))
    small = steps <= 1e-12 * scale
    if np.all(small[-4:]):
        converges = True
    else:
        pos = steps > 0
        converges = pos.sum() >= 3 and _slope(np.arange(steps.size)[pos], np.log2(steps[pos])) < -0.05 \
            and steps[-1] < 0.5 * steps[0]
    if converges:
        limit = complex(wt[-1])
        ratios = steps[1:][steps[:-1] > 0] / steps[:-1][steps[:-1] > 0]
        r = float(np.median(ratios[-4:])) if ratios.size else 0.0
        if 0 < r < 0.95:
            # geometric tail of the remaining steps
            limit = limit + (wt[-1] - wt[-2]) * r / (1 - r)
        im = np.maximum(wt.imag, 1e-300)
        im_slope = _slope(np.log(yt), np.log(im))
        J_slope = _slope(np.log(yt), np.log(np.maximum(Jt, 1e-300)))
        J_bounded = J_slope >= -0.05
        if abs(im_slope) <= 0.05 and wt.imag[-1] > 0:
            return SpectralVerdict(tau, "TrueAC", complex(limit.real, wt.imag[-1]), trace,
                                   f"limit with Im = {wt.imag[-1]:.6g} > 0", True, tuple(w))
        if J_bounded:
            return SpectralVerdict(tau, "Julia", complex(limit.real, 0.0), trace,
                                   f"B-point: Julia quotient bounded (slope {J_slope:.3f}), limit {limit.real:.6g}",
                                   True, tuple(w))
        return SpectralVerdict(tau, "Crypto", complex(limit.real, 0.0), trace,
                               f"real limit {limit.real:.6g}; Im f decays like y^{im_slope:.3f}, "
                               f"Julia quotient unbounded", True, tuple(w))

    mod = np.abs(wt)
    # steps do not decay, so a monotone |f| is heading to infinity
    growing = bool(np.all(np.diff(mod) > 0))
    if growing:
        return SpectralVerdict(tau, "Crypto", math.inf, trace,
                               "|f| grows without a pole: infinite limit", True, tuple(w))
    spread = float(np.ptp(wt.real) + np.ptp(wt.imag))
    increment = float(np.median(steps)) if steps.size else 0.0
    if spread > oscillation_factor * increment:
        return SpectralVerdict(tau, "Ethereal", None, trace,
                               f"oscillation: spread {spread:.3g} vs step {increment:.3g}", True, tuple(w))
    return SpectralVerdict(tau, "Ethereal", None, trace, "no limit detected", True, tuple(w))


# -- enigmas ---------------------------------------------------------------------------------

@dataclass
class EnigmaResult:
    member: bool
    f_branch: object
    reciprocal_branch: object

    def __bool__(self):
        return self.member

    def to_json(self):
        def br(e):
            return {"bounded": e.bounded, "slope": e.trend,
                    "limsup": None if not math.isfinite(e.limsup) or e.limsup >= 1e307 else e.limsup}
        return {"member": self.member, "f": br(self.f_branch), "reciprocal": br(self.reciprocal_branch)}


def enigma_member(f: PickFunction, kappa: Gauge, lam: Gauge, tau: float = 0.0, grid=None, jobs=None) -> EnigmaResult:
    """Bounded averaged quotient for f or for -1/f."""
    grid = grid_between(*ENIGMA_GRID) if grid is None else np.asarray(grid, dtype=float)
    if np.any(np.asarray(lam(grid)) <= 0):
        raise ValueError("lam must be positive on the grid")
    ef = cc_lim_estimate(quotient_series(f, kappa, lam, tau, grid, method="auto", jobs=jobs))
    er = cc_lim_estimate(quotient_series(NegativeReciprocal(f), kappa, lam, tau, grid, method="direct", jobs=jobs))
    return EnigmaResult(ef.bounded or er.bounded, ef, er)


def crypto_gauge(f: PickFunction, tau: float = 0.0, lo_exp: int = 24, hi_exp: int = 1) -> Tabulated:
    """``kappa(t) = (1/2t) int_{tau-t}^{tau+t} Im g(x + it) dx`` at a cryptospectral point.

    ``g = f`` for a finite (real) limit and ``g = -1/f`` for an infinite one,
    so that the averaged quotient with lam = id is identically 1.
    """
    verdict = classify_point(f, tau)
    if verdict.cls != "Crypto":
        raise ClassificationError(f"point is {verdict.cls}, not in the cryptospectrum")
    g = NegativeReciprocal(f) if verdict.nt_limit_estimate == math.inf else f
    ts = 2.0 ** -np.arange(lo_exp, hi_exp - 1, -1, dtype=float)
    vals = []
    for t in ts:
        pts = [p for p in g.singular_points() if tau - t < p < tau + t] + [tau]
        integral, _ = quadrature.integrate(lambda x: g(x + 1j * t).imag, tau - t, tau + t,
                                           rtol=1e-11, points=sorted(set(pts)))
        vals.append(integral / (2.0 * t))
    return Tabulated(tuple(ts), tuple(vals))


def crypto_reference(f: PickFunction, tau: float = 0.0):
    """The function whose averaged quotient the crypto gauge normalises."""
    verdict = classify_point(f, tau)
    return NegativeReciprocal(f) if verdict.nt_limit_estimate == math.inf else f


def enigma_fortune_gauge(kappa: Gauge, lam: Gauge) -> Gauge:
    """``lam(t) * kappa(lam(t)) / t``; needs lam = Omega(t) and kappa = o(1)."""
    if not asymptotic_class(lam, IDENTITY).is_Omega:
        raise PreconditionError("lam must be Omega(t)", hypothesis="lam is Omega(t)")
    if asymptotic_class(kappa, ONE).relation != "o":
        raise PreconditionError("kappa must be o(1)", hypothesis="kappa is o(1)")
    return product(lam, compose(kappa, lam), (IDENTITY, -1.0))


# -- conformal invariance --------------------------------------------------------------------

@dataclass
class InvarianceReport:
    member_f: bool
    member_mf: bool
    agreement: bool
    hypotheses: dict
    boundary_value: object
    details: dict = field(default_factory=dict)

    def to_json(self):
        bv = self.boundary_value
        bv_js = None if bv is None else ("inf" if bv == math.inf else [complex(bv).real, complex(bv).imag])
        return {"member_f": self.member_f, "member_mf": self.member_mf, "agreement": self.agreement,
                "hypotheses": self.hypotheses, "boundary_value": bv_js}


def invariance_hypotheses(kappa: Gauge, lam: Gauge, gamma: Gauge) -> dict:
    checks = {
        "gamma is O(t)": asymptotic_class(gamma, IDENTITY).is_O,
        "gamma is monotone": gamma.is_increasing(),
        "lam is O(t)": asymptotic_class(lam, IDENTITY).is_O,
        "lam is Omega(gamma)": asymptotic_class(lam, gamma).is_Omega,
        "kappa o lam is a gamma-augury": is_augury(compose(kappa, lam), gamma, 1.0).holds,
    }
    return checks


def conformal_invariance_check(f: PickFunction, M: MobiusMap, kappa: Gauge, lam: Gauge, gamma: Gauge,
                               tau: float = 0.0, grid=None, jobs=None) -> InvarianceReport:
    hyp = invariance_hypotheses(kappa, lam, gamma)
    failed = [name for name, ok in hyp.items() if not ok]
    if failed:
        raise PreconditionError(f"hypothesis fails: {failed[0]}", hypothesis=failed[0])
    verdict = classify_point(f, tau)
    boundary = verdict.nt_limit_estimate
    if boundary is not None and M.singular_at(boundary):
        raise SingularityError(f"Mobius map is singular at the boundary value {boundary}")
    ef = enigma_member(f, kappa, lam, tau, grid, jobs)
    em = ef if M == IDENTITY_MAP else enigma_member(mobius_compose(M, f), kappa, lam, tau, grid, jobs)
    return InvarianceReport(ef.member, em.member, ef.member == em.member, hyp, boundary,
                            {"f": ef.to_json(), "Mf": em.to_json(), "class": verdict.cls})


# -- horocycles --------------------------------------------------------------------------------

def horocycle_net(gamma: Gauge, alpha: float, beta: float, tau: float, size: int = 2000, seed: int = 0):
    """Quasi-random points of {Im z >= beta gamma(alpha |x - tau|)} inside B(tau, 1/beta)."""
    r = 1.0 / beta
    pts = []
    u = qmc.Halton(d=2, seed=seed).random(4 * size)
    for ux, uy in u:
        x = (2 * ux - 1) * r
        top = math.sqrt(max(r * r - x * x, 0.0))
        bottom = beta * gamma(alpha * abs(x)) if x != 0 else 0.0
        if bottom < top and top > 0:
            y = bottom + (top - bottom) * uy * uy
            if y > 0:
                pts.append(tau + x + 1j * y)
        if len(pts) >= size:
            break
    # the lower boundary curve, where the supremum tends to sit
    xs = np.concatenate([-np.geomspace(r, r * 1e-9, size // 4), np.geomspace(r * 1e-9, r, size // 4)])
    for x in xs:
        y = beta * gamma(alpha * abs(x))
        if 0 < y and x * x + y * y < r * r:
            pts.append(tau + x + 1j * y)
    return np.asarray(pts, dtype=complex)


def horocyclic_profile(f: PickFunction, gamma: Gauge, alpha: float, tau: float, beta_grid,
                       size: int = 2000, seed: int = 0):
    """``sup |f(z) - f(tau)|`` over each horocyclic region; returns a list of (beta, sup)."""
    if not gamma.is_increasing():
        raise ValueError("gamma must be monotone")
    if not asymptotic_class(gamma, IDENTITY).is_O:
        raise PreconditionError("gamma must be O(t)", hypothesis="gamma is O(t)")
    verdict = classify_point(f, tau)
    lim = verdict.nt_limit_estimate
    if lim is None or lim == math.inf:
        raise ClassificationError(f"no finite boundary value at tau ({verdict.cls}: {verdict.diagnostics})")
    out = []
    for beta in beta_grid:
        z = horocycle_net(gamma, alpha, float(beta), tau, size, seed)
        out.append((float(beta), float(np.max(np.abs(np.asarray(f(z)) - lim))) if z.size else 0.0))
    return out


def eventually_nonincreasing(values, start_fraction=0.5, slack=1e-12):
    vals = np.asarray(values, dtype=float)
    tail = vals[int(len(vals) * start_fraction):]
    return bool(np.all(np.diff(tail) <= slack * max(1.0, float(np.max(np.abs(tail))))))


def kernel_extreme_bound_check(gamma: Gauge, beta: float, C: float, net_size: int = 10_000):
    """Brute-force sup of ``|gamma(|t|)/(t - z) - gamma(|t|)/t|`` on the curve z = x + i beta gamma(2|x|).

    Returns ``(observed_sup, bound, holds)`` with bound ``max(2C, (1 + beta C)/beta)``.
    """
    Cg = order_constant(gamma)
    if Cg > C * (1 + 1e-12):
        raise PreconditionError(f"gamma(t)/t reaches {Cg:g} > C = {C:g}", hypothesis="gamma is O(t) with constant C")
    n = int(round(math.sqrt(net_size)))
    r = 1.0 / beta
    lo, hi = gamma.domain()
    tmin = max(lo, 1e-8)
    tmax = min(1.0, hi * (1 - 1e-12))
    t_pos = np.geomspace(tmin, tmax, n // 2)
    t = np.concatenate([-t_pos[::-1], t_pos])
    x_hi = min(r, tmax / 2)
    x_pos = np.geomspace(tmin / 2, x_hi, n // 2)
    x = np.concatenate([-x_pos[::-1], x_pos])
    y = beta * np.asarray(gamma(2 * np.abs(x)))
    z = x + 1j * y
    z = z[np.abs(z) <= r]
    g = np.asarray(gamma(np.abs(t)))
    vals = np.abs(g[:, None] / (t[:, None] - z[None, :]) - (g / t)[:, None])
    observed = float(vals.max()) if vals.size else 0.0
    bound = max(2 * C, (1 + beta * C) / beta)
    return observed, bound, observed <= bound * (1 + 1e-9)
