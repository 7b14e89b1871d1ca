"""Verdicts for sub-density, fortune and gamma-regularity of a boundary point.

"Bounded as eps -> 0" is always decided by :func:`cc_lim_estimate` on a
dyadic grid, so these verdicts carry a heuristic flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergentValue, PreconditionError, UnsupportedError, is_divergent
from .gauges import (IDENTITY, ONE, Gauge, PowerLog, Tabulated, asymptotic_class, compose,
                     decompose_fortune, dyadic_table, is_augury, product)
from .measures import Measure, radial_integral, window_mass
from .pick import NevanlinnaTriple, PickFunction
from .quotients import cc_lim_estimate, grid_between, quotient_series

C_SWEEP = (0.5, 1.0, 2.0, 4.0)
DEFAULT_GRID = (3, 24)
SHELLS = 64
DIVERGENCE_CAP = 1e12


@dataclass
class RegularityVerdict:
    kind: str
    holds: bool
    C_used: float
    statistic: float
    heuristic: bool = True
    details: dict = field(default_factory=dict)

    def to_json(self):
        stat = self.statistic
        return {"kind": self.kind, "holds": bool(self.holds), "C_used": self.C_used,
                "statistic": None if is_divergent(stat) else float(stat),
                "heuristic": self.heuristic, "details": _jsonable(self.details)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, float, np.floating, np.integer)):
        v = float(obj)
        return None if is_divergent(v) or not math.isfinite(v) else v
    if isinstance(obj, Gauge):
        return obj.to_json()
    return obj if obj is None or isinstance(obj, str) else repr(obj)


def _grid(grid):
    return grid_between(*DEFAULT_GRID) if grid is None else np.asarray(grid, dtype=float)


def sub_density_verdict(mu: Measure, F: Gauge, tau: float = 0.0, C_sweep=C_SWEEP,
                        grid=None) -> RegularityVerdict:
    """Is ``mu(tau-eps, tau+eps) / (F(C eps) eps)`` bounded for some C in the sweep?"""
    grid = _grid(grid)
    masses = window_mass(mu, tau, grid)
    per_C = {}
    for C in C_sweep:
        q = masses / (np.asarray(F(C * grid)) * grid)
        est = cc_lim_estimate((grid, tuple(q)))
        per_C[C] = {"sup": float(np.max(q)), "bounded": est.bounded, "slope": est.trend}
    good = [C for C in C_sweep if per_C[C]["bounded"]]
    if good:
        C = min(good, key=lambda c: per_C[c]["sup"])
        return RegularityVerdict("sub_density", True, C, per_C[C]["sup"], True, {"per_C": per_C})
    C = C_sweep[0]
    return RegularityVerdict("sub_density", False, C, DivergentValue(1.0, "unbounded density quotient"),
                             True, {"per_C": per_C})


def fortunate_verdict(f: PickFunction, F: Gauge, tau: float = 0.0, grid=None, jobs=None) -> RegularityVerdict:
    """Decompose F = kappa o lam and test the three fortune conditions.

    (1) holds by construction with C = 1; (2) boundedness of
    lam(eps) / (F(eps) eps^2) is checked symbolically (or on the table);
    (3) is the cc-lim estimate of the averaged-quotient series.
    """
    kappa, lam = decompose_fortune(F)
    grid = _grid(grid)
    if isinstance(lam, Tabulated) or isinstance(F, Tabulated):
        ratio = np.asarray(lam(grid)) / (np.asarray(F(grid)) * grid * grid)
        cond2 = bool(np.all(ratio <= 1.0 + 1e-12))
    else:
        cond2 = asymptotic_class(lam, product(F, (IDENTITY, 2.0))).is_O
    series = quotient_series(f, kappa, lam, tau, grid, method="auto", jobs=jobs)
    est = cc_lim_estimate(series)
    holds = cond2 and est.bounded
    details = {"kappa": kappa, "lam": lam, "tail_condition": cond2, "slope": est.trend,
               "values": list(series.values), "grid": list(series.grid), "method": series.method}
    return RegularityVerdict("fortunate", holds, 1.0, est.limsup, True, details)


def _annuli_sum(mu, gamma, tau, C, radius=1.0, shells=SHELLS):
    """Partial sums of int_{|t-tau| <= radius} dmu / gamma(C |t - tau|) over dyadic annuli."""
    inv = lambda r: 1.0 / np.asarray(gamma(C * np.asarray(r, dtype=float)))
    atom = mu.mass_at(tau)
    if atom > 0:
        g0 = gamma.limit_at_zero()
        if g0 == 0:
            return DivergentValue(1.0, "atom at tau and gamma(0+) = 0"), []
        base = atom / g0
    else:
        base = 0.0
    terms = []
    total = base
    for k in range(shells):
        r1 = radius * 2.0 ** -k
        term = radial_integral(mu, inv, tau, r1 / 2, r1)
        terms.append(term)
        total += term
        if total > DIVERGENCE_CAP:
            return DivergentValue(1.0, f"partial sum above {DIVERGENCE_CAP:g}"), terms
        if window_mass(mu, tau, r1 / 2, closed=True) - atom <= 0:
            break
    return total, terms


def _decaying(terms):
    """True when the annulus terms decay geometrically (or vanish) on the tail."""
    terms = np.asarray(terms, dtype=float)
    if terms.size < 8:
        return True
    ks = np.arange(terms.size)
    half = terms.size // 2
    tk, tv = ks[half:], terms[half:]
    pos = tv > 0
    if pos.sum() < 2:
        return True
    slope = np.polyfit(tk[pos], np.log2(tv[pos]), 1)[0]
    return bool(slope < -0.05)


def gamma_regular_verdict(mu: Measure, gamma: Gauge, tau: float = 0.0, C_sweep=C_SWEEP) -> RegularityVerdict:
    """Is ``1/gamma(C |t - tau|)`` mu-integrable near tau for some C in the sweep?"""
    if not gamma.is_increasing():
        raise ValueError("gamma must be monotone increasing")
    if not asymptotic_class(gamma, ONE).is_O:
        raise PreconditionError("gamma must be O(1) at 0", hypothesis="gamma is O(1)")
    per_C = {}
    for C in C_sweep:
        radius = 1.0
        if gamma.domain()[1] <= C:
            # the gauge only lives on (0, t1): shrink the neighbourhood, which is harmless locally
            radius = 0.5 * gamma.domain()[1] / C
        total, terms = _annuli_sum(mu, gamma, tau, C, radius)
        ok = not is_divergent(total) and _decaying(terms)
        per_C[C] = {"integral": total, "converges": ok, "shells": len(terms)}
    good = [C for C in C_sweep if per_C[C]["converges"]]
    if good:
        C = good[0]
        return RegularityVerdict("gamma_regular", True, C, float(per_C[C]["integral"]), True, {"per_C": per_C})
    return RegularityVerdict("gamma_regular", False, C_sweep[0], DivergentValue(1.0, "annuli sums diverge"),
                             True, {"per_C": per_C})


@dataclass
class EquivalenceReport:
    regular: RegularityVerdict
    augury: bool
    augury_C: float | None
    fortunate: RegularityVerdict
    backward: RegularityVerdict | None
    agreement: bool
    notes: list = field(default_factory=list)

    def to_json(self):
        return {"regular": self.regular.to_json(), "augury": self.augury, "augury_C": self.augury_C,
                "fortunate": self.fortunate.to_json(),
                "backward": None if self.backward is None else self.backward.to_json(),
                "agreement": self.agreement, "notes": self.notes}


def window_fortune_gauge(mu: Measure, tau: float = 0.0, lo_exp: int = 46, hi_exp: int = 2,
                         per_octave: int = 4) -> Tabulated:
    """The tabulated gauge ``F(t) = mu(tau - t, tau + t) / t`` on a dyadic table."""
    ts = 2.0 ** (np.arange(-lo_exp * per_octave, hi_exp * per_octave + 1) / per_octave)
    vals = window_mass(mu, tau, ts) / ts
    if np.any(vals <= 0):
        raise ValueError("mu gives no mass to small windows around tau")
    return Tabulated(tuple(ts), tuple(vals))


def regfort_equivalence_check(f: PickFunction, gamma: Gauge, tau: float = 0.0, augury: Gauge | None = None,
                              C_sweep=C_SWEEP, grid=None) -> EquivalenceReport:
    """Check gamma-regular <=> (F is a gamma-augury and f is F-fortunate).

    Forward: build F(t) = mu(tau-t, tau+t)/t from window masses, test the
    augury property and fortune.  Backward: given an augury (or the
    constructed one when it qualifies) under which f is fortunate, the
    gamma-regularity verdict must hold.
    """
    t = f.triple()
    if t is None:
        raise UnsupportedError("equivalence check needs a Nevanlinna triple")
    mu = t.mu
    regular = gamma_regular_verdict(mu, gamma, tau, C_sweep)
    notes = []
    F = window_fortune_gauge(mu, tau)
    certs = {C: is_augury(F, gamma, C) for C in C_sweep}
    aug_C = next((C for C in C_sweep if certs[C].holds), None)
    fortunate = fortunate_verdict(f, F, tau, grid)
    forward_ok = regular.holds == (aug_C is not None and fortunate.holds)
    notes.append(f"constructed gauge augury: {certs[C_sweep[0]].reason}")
    backward = None
    supplied = augury if augury is not None else (F if aug_C is not None else None)
    backward_ok = True
    if supplied is not None:
        sup_aug = any(is_augury(supplied, gamma, C).holds for C in C_sweep)
        sup_fort = fortunate_verdict(f, supplied, tau, grid) if supplied is not F else fortunate
        if sup_aug and sup_fort.holds:
            backward = regular
            backward_ok = regular.holds
            notes.append("backward direction exercised")
        else:
            notes.append("supplied gauge is not a fortunate augury; backward direction vacuous")
    return EquivalenceReport(regular, aug_C is not None, aug_C, fortunate, backward,
                             forward_ok and backward_ok, notes)
