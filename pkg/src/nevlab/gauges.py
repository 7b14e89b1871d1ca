"""Gauge functions near 0: ``c * t**p * log(1/t)**q`` and sampled tables.

Gauges play four roles (the quotient weight, the approach height, the
regularity weight and the fortune gauge), and all of them only matter as
``t -> 0``.  Symbolic gauges are compared exactly through their
``(power, logpower, coefficient)`` signature; tabulated gauges go through
numeric heuristics and every such verdict is flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import quadrature
from .errors import PreconditionError, UnsupportedError

TREND_BAND = 0.05


class Gauge:
    """Positive function on (0, t0).  Subclasses implement ``_eval``."""

    symbolic = False

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = self._eval(t_arr)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = self._deriv(t_arr)
        return float(out) if np.ndim(out) == 0 else out

    def breakpoints(self):
        return []

    def signature(self):
        """``(coeff, power, logpower)`` describing the behaviour at 0, or None."""
        return None

    def domain(self):
        return 0.0, math.inf

    def is_increasing(self):
        raise NotImplementedError

    def limit_at_zero(self):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError

    def __mul__(self, other):
        return product(self, other)

    def scaled(self, c):
        return product(self, PowerLog(c, 0.0, 0.0))


@dataclass(frozen=True)
class PowerLog(Gauge):
    """``coeff * t**power * log(1/t)**logpower``; with a log factor it lives on (0, 1)."""

    coeff: float = 1.0
    power: float = 0.0
    logpower: float = 0.0
    symbolic = True

    def __post_init__(self):
        for name in ("coeff", "power", "logpower"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.coeff > 0 and math.isfinite(self.coeff)):
            raise ValueError("gauge coefficient must be positive and finite")
        if not (math.isfinite(self.power) and math.isfinite(self.logpower)):
            raise ValueError("gauge exponents must be finite")

    def domain(self):
        return (0.0, 1.0) if self.logpower else (0.0, math.inf)

    def _check(self, t):
        if np.any(t < 0):
            raise ValueError("gauges are defined for t >= 0 only")
        if self.logpower and np.any(t >= 1):
            raise ValueError("gauge with a log factor is only defined on (0, 1)")

    def _eval(self, t):
        self._check(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.coeff * np.power(t, self.power)
            if self.logpower:
                out = out * np.power(-np.log(t), self.logpower)
        return np.where(t == 0, self.limit_at_zero(), out)

    def _deriv(self, t):
        self._check(t)
        c, p, q = self.coeff, self.power, self.logpower
        if q == 0:
            return c * p * np.power(t, p - 1) if p != 0 else np.zeros_like(t)
        L = -np.log(t)
        return c * np.power(t, p - 1) * np.power(L, q - 1) * (p * L - q)

    def signature(self):
        return self.coeff, self.power, self.logpower

    def is_increasing(self):
        # derivative sign is that of p*L - q for L = log(1/t) in (0, inf)
        return self.power >= 0 and self.logpower <= 0

    def limit_at_zero(self):
        p, q = self.power, self.logpower
        if p > 0 or (p == 0 and q < 0):
            return 0.0
        if p < 0 or q > 0:
            return math.inf
        return self.coeff

    def inverse(self):
        """Inverse function of a pure power law ``c t^p`` with p != 0."""
        if self.logpower or self.power == 0:
            raise UnsupportedError("only pure power laws with nonzero power are invertible")
        p = self.power
        return PowerLog(self.coeff ** (-1.0 / p), 1.0 / p, 0.0)

    def to_json(self):
        return {"coeff": self.coeff, "power": self.power, "log": self.logpower}

    def __repr__(self):
        text = f"{self.coeff:g}*t^{self.power:g}"
        return text + (f"*log(1/t)^{self.logpower:g}" if self.logpower else "")


def power(p, coeff=1.0):
    return PowerLog(coeff, p, 0.0)


def constant(c=1.0):
    return PowerLog(c, 0.0, 0.0)


IDENTITY = PowerLog(1.0, 1.0, 0.0)
ONE = PowerLog(1.0, 0.0, 0.0)


@dataclass(frozen=True)
class Tabulated(Gauge):
    """Linear interpolation of samples ``(t_i, v_i)`` with increasing ``t_i > 0``.

    Evaluation outside ``[t_0, t_n]`` is an error.  The table need not be
    monotone; operations that need monotonicity check it themselves.
    """

    ts: tuple = ()
    vs: tuple = ()

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        vs = np.asarray(self.vs, dtype=float)
        if ts.ndim != 1 or ts.size < 2 or ts.shape != vs.shape:
            raise ValueError("table needs at least two (t, value) samples")
        if np.any(ts <= 0) or np.any(np.diff(ts) <= 0):
            raise ValueError("table abscissae must be positive and strictly increasing")
        if not np.all(np.isfinite(vs)) or np.any(vs <= 0):
            raise ValueError("table values must be positive and finite")
        object.__setattr__(self, "ts", tuple(ts.tolist()))
        object.__setattr__(self, "vs", tuple(vs.tolist()))

    @cached_property
    def _t(self):
        return np.asarray(self.ts)

    @cached_property
    def _v(self):
        return np.asarray(self.vs)

    def domain(self):
        return self.ts[0], self.ts[-1]

    def _check(self, t):
        lo, hi = self.ts[0], self.ts[-1]
        # allow rounding slop at the ends of the table
        if np.any(t < lo * (1 - 1e-12)) or np.any(t > hi * (1 + 1e-12)):
            raise ValueError(f"tabulated gauge evaluated outside its table [{lo:g}, {hi:g}]")

    def _eval(self, t):
        self._check(t)
        return np.interp(t, self._t, self._v)

    def _deriv(self, t):
        self._check(t)
        slopes = np.diff(self._v) / np.diff(self._t)
        k = np.clip(np.searchsorted(self._t, t, side="right") - 1, 0, slopes.size - 1)
        return slopes[k]

    def breakpoints(self):
        return list(self.ts)

    def is_increasing(self):
        return bool(np.all(np.diff(self._v) >= 0))

    def is_strictly_increasing(self):
        return bool(np.all(np.diff(self._v) > 0))

    def tail_slope(self, decades=1.0):
        """Log-log slope of the table over its first ``decades`` decades."""
        t, v = self._t, self._v
        sel = t <= t[0] * 10 ** decades
        if sel.sum() < 2:
            sel = slice(0, 2)
        return float(np.polyfit(np.log(t[sel]), np.log(v[sel]), 1)[0])

    def limit_at_zero(self):
        # heuristic, read off the trend at the small end of the table
        s = self.tail_slope()
        if s > TREND_BAND:
            return 0.0
        if s < -TREND_BAND:
            return math.inf
        return float(self._v[0])

    def to_json(self):
        return {"table": [[t, v] for t, v in zip(self.ts, self.vs)]}


def tabulate(fn, ts):
    """Sample a callable on ``ts`` into a :class:`Tabulated` gauge."""
    ts = np.asarray(sorted(ts), dtype=float)
    return Tabulated(tuple(ts), tuple(np.asarray(fn(ts), dtype=float)))


def dyadic_table(fn, lo_exp, hi_exp=0, per_octave=4):
    """Sample ``fn`` at ``2**(k/per_octave)`` for k from ``lo_exp*per_octave`` to ``hi_exp*per_octave``."""
    ks = np.arange(lo_exp * per_octave, hi_exp * per_octave + 1)
    return tabulate(fn, 2.0 ** (ks / per_octave))


@dataclass(frozen=True)
class Composite(Gauge):
    """``outer(inner(t))`` evaluated pointwise."""

    outer: Gauge
    inner: Gauge

    def _eval(self, t):
        return np.asarray(self.outer(self.inner(t)), dtype=float)

    def _deriv(self, t):
        return np.asarray(self.outer.derivative(self.inner(t)), dtype=float) * self.inner.derivative(t)

    def breakpoints(self):
        return list(self.inner.breakpoints())

    def domain(self):
        return self.inner.domain()

    def signature(self):
        so, si = self.outer.signature(), self.inner.signature()
        if so is None or si is None or si[1] <= 0:
            return None
        # log(1/(c t^p L^q)) ~ p L, so the composite behaves like this near 0
        c1, p1, q1 = so
        c2, p2, q2 = si
        return c1 * c2 ** p1 * p2 ** q1, p1 * p2, q1 + p1 * q2

    def is_increasing(self):
        return _both_monotone(self.outer, self.inner)

    def limit_at_zero(self):
        sig = self.signature()
        if sig is not None:
            return PowerLog(*sig).limit_at_zero()
        inner0 = self.inner.limit_at_zero()
        if inner0 == 0:
            return self.outer.limit_at_zero()
        if math.isfinite(inner0):
            return float(self.outer(inner0))
        raise UnsupportedError("limit at 0 of this composite is not available")

    def to_json(self):
        return {"compose": [self.outer.to_json(), self.inner.to_json()]}


def _both_monotone(outer, inner):
    return bool(outer.is_increasing() and inner.is_increasing())


@dataclass(frozen=True)
class Product(Gauge):
    """Pointwise product ``prod g_i(t) ** e_i``."""

    factors: tuple = ()

    def _eval(self, t):
        out = np.ones_like(t, dtype=float)
        for g, e in self.factors:
            out = out * np.asarray(g(t), dtype=float) ** e
        return out

    def _deriv(self, t):
        # logarithmic derivative: sum e_i g_i'/g_i
        val = self._eval(t)
        acc = np.zeros_like(val)
        for g, e in self.factors:
            acc = acc + e * np.asarray(g.derivative(t)) / np.asarray(g(t))
        return val * acc

    def breakpoints(self):
        return sorted({b for g, _ in self.factors for b in g.breakpoints()})

    def domain(self):
        lo = max(g.domain()[0] for g, _ in self.factors)
        hi = min(g.domain()[1] for g, _ in self.factors)
        return lo, hi

    def signature(self):
        sigs = [(g.signature(), e) for g, e in self.factors]
        if any(s is None for s, _ in sigs):
            return None
        c = math.prod(s[0] ** e for s, e in sigs)
        return c, sum(s[1] * e for s, e in sigs), sum(s[2] * e for s, e in sigs)

    def is_increasing(self):
        sig = self.signature()
        if sig is not None:
            return PowerLog(*sig).is_increasing()
        lo, hi = self.domain()
        ts = np.geomspace(max(lo, 1e-300), min(hi, 1.0), 400)
        return bool(np.all(np.diff(self(ts)) >= 0))

    def limit_at_zero(self):
        sig = self.signature()
        if sig is None:
            raise UnsupportedError("limit at 0 of a product of tabulated gauges")
        return PowerLog(*sig).limit_at_zero()

    def to_json(self):
        return {"product": [[g.to_json(), e] for g, e in self.factors]}


def product(*gauges_and_exponents):
    """Multiply gauges; arguments are gauges or ``(gauge, exponent)`` pairs.

    Symbolic factors combine exactly into one :class:`PowerLog`.
    """
    pairs = [(g, 1.0) if isinstance(g, Gauge) else (g[0], float(g[1])) for g in gauges_and_exponents]
    if all(isinstance(g, PowerLog) for g, _ in pairs):
        c = math.prod(g.coeff ** e for g, e in pairs)
        return PowerLog(c, sum(g.power * e for g, e in pairs), sum(g.logpower * e for g, e in pairs))
    return Product(tuple(pairs))


def compose(outer: Gauge, inner: Gauge) -> Gauge:
    """``outer o inner``; exact symbolic result whenever the algebra allows it."""
    if isinstance(outer, PowerLog) and isinstance(inner, PowerLog):
        c1, p1, q1 = outer.signature()
        c2, p2, q2 = inner.signature()
        if p1 == 0 and q1 == 0:
            return PowerLog(c1, 0.0, 0.0)
        if q1 == 0:
            return PowerLog(c1 * c2 ** p1, p1 * p2, p1 * q2)
        if q2 == 0 and c2 == 1.0 and p2 > 0:
            # log(1/t^p2) = p2 log(1/t) exactly
            return PowerLog(c1 * p2 ** q1, p1 * p2, q1)
    if isinstance(inner, Tabulated) and isinstance(outer, Tabulated):
        lo, hi = outer.domain()
        vals = np.asarray(inner.vs)
        if vals.min() < lo * (1 - 1e-12) or vals.max() > hi * (1 + 1e-12):
            raise ValueError("inner gauge range is not inside the outer table")
    return Composite(outer, inner)


# -- asymptotic comparison --------------------------------------------------------------

RELATIONS = ("O", "o", "Omega", "Theta", "omega", "incomparable")


@dataclass(frozen=True)
class AsymptoticClass:
    """Relation of g to h as t -> 0, with a flag for sample-based verdicts."""

    relation: str
    heuristic: bool = False
    slope: float | None = None

    @property
    def is_O(self):
        return self.relation in ("O", "o", "Theta")

    @property
    def is_Omega(self):
        return self.relation in ("Omega", "omega", "Theta")

    def __str__(self):
        return self.relation


def asymptotic_class(g: Gauge, h: Gauge, t0: float | None = None) -> AsymptoticClass:
    """Classify g against h near 0: o, Theta, omega (or incomparable)."""
    sg, sh = g.signature(), h.signature()
    if sg is not None and sh is not None:
        dp, dq = sg[1] - sh[1], sg[2] - sh[2]
        if dp > 0 or (dp == 0 and dq < 0):
            return AsymptoticClass("o")
        if dp < 0 or (dp == 0 and dq > 0):
            return AsymptoticClass("omega")
        return AsymptoticClass("Theta")
    lo = max(g.domain()[0], h.domain()[0])
    hi = min(g.domain()[1], h.domain()[1], 1.0 if t0 is None else t0)
    if lo <= 0:
        lo = hi * 2.0 ** -40
    ts = np.geomspace(lo, hi * (1 - 1e-12), 81)
    ratio = np.log(np.asarray(g(ts)) / np.asarray(h(ts)))
    tail = ts.size // 2
    x = np.log(ts[:tail + 1])
    y = ratio[:tail + 1]
    slope, icpt = np.polyfit(x, y, 1)
    resid = np.max(np.abs(y - (slope * x + icpt)))
    if slope > TREND_BAND:
        rel = "o"
    elif slope < -TREND_BAND:
        rel = "omega"
    elif resid > 1.0:
        rel = "incomparable"
    else:
        rel = "Theta"
    return AsymptoticClass(rel, heuristic=True, slope=float(slope))


def order_constant(g: Gauge, t0: float = 1.0) -> float:
    """sup of g(t)/t on (0, t0]; raises unless g is O(t)."""
    if not asymptotic_class(g, IDENTITY).is_O:
        raise PreconditionError("gauge is not O(t)", hypothesis="gamma is O(t)")
    sig = g.signature()
    if isinstance(g, PowerLog) and sig[2] == 0:
        c, p, _ = sig
        return c if p == 1 else c * t0 ** (p - 1)
    lo, hi = g.domain()
    ts = np.geomspace(max(lo, 1e-300), min(hi * (1 - 1e-12), t0), 4000)
    return float(np.max(np.asarray(g(ts)) / ts))


# -- augury --------------------------------------------------------------------------------

@dataclass(frozen=True)
class AuguryCertificate:
    holds: bool
    heuristic: bool
    reason: str
    exponent: float | None = None
    shell_terms: tuple = field(default=(), repr=False)

    def __bool__(self):
        return self.holds


def is_augury(F: Gauge, gamma: Gauge, C: float = 1.0, depth: int = 40) -> AuguryCertificate:
    """Is ``t F(Ct) gamma'(t) / gamma(t)^2`` integrable near 0?"""
    if C <= 0:
        raise ValueError("C must be positive")
    if not gamma.is_increasing():
        raise ValueError("augury needs a monotone increasing gamma")
    sF, sg = F.signature(), gamma.signature()
    if sF is not None and sg is not None and not isinstance(F, Tabulated) and not isinstance(gamma, Tabulated):
        _, s, qF = sF
        _, eta, qg = sg
        if eta == 0 and qg == 0:
            return AuguryCertificate(True, False, "gamma is constant, so d gamma = 0", None)
        if eta > 0:
            # integrand ~ t^(s - eta) log(1/t)^(qF - qg)
            e, lq = s - eta, qF - qg
        else:
            # eta = 0, qg < 0: gamma' / gamma^2 ~ t^-1 log(1/t)^(-qg - 1)
            e, lq = s - 1.0, qF - qg - 1.0
        ok = e > -1 or (e == -1 and lq < -1)
        why = f"integrand ~ t^{e:g} log(1/t)^{lq:g}; integrable at 0 iff exponent > -1"
        return AuguryCertificate(ok, False, why, e)
    return _augury_probe(F, gamma, C, depth)


def _augury_probe(F, gamma, C, depth):
    """Dyadic shell integrals of the augury integrand; decide by their decay rate."""
    lo = max(gamma.domain()[0], F.domain()[0] / C)
    hi = min(1.0, gamma.domain()[1], F.domain()[1] / C)
    top = math.floor(-math.log2(hi) + 1e-9) if hi < 1 else 0
    bottom = min(depth, math.floor(-math.log2(lo) + 1e-9)) if lo > 0 else depth
    if bottom - top < 8:
        raise ValueError("gauge tables too short for an augury probe")
    pts = sorted(set(gamma.breakpoints()) | {b / C for b in F.breakpoints()})

    def integrand(t):
        return t * np.asarray(F(C * t)) * np.asarray(gamma.derivative(t)) / np.asarray(gamma(t)) ** 2

    terms = []
    for k in range(top, bottom):
        a, b = 2.0 ** -(k + 1), 2.0 ** -k
        inner = [p for p in pts if a < p < b]
        terms.append(quadrature.integrate(integrand, a, b, rtol=1e-8, atol=1e-300, points=inner)[0])
    terms = np.array(terms)
    ks = np.arange(top, bottom)
    half = ks.size // 2
    tk, tv = ks[half:], terms[half:]
    pos = tv > 0
    if not pos.any():
        return AuguryCertificate(True, True, "integrand vanishes on the tail shells", None, tuple(terms))
    slope = float(np.polyfit(tk[pos], np.log2(tv[pos]), 1)[0]) if pos.sum() >= 2 else -math.inf
    ok = slope < -TREND_BAND
    why = f"dyadic shell integrals decay like 2^({slope:.3f} k)"
    return AuguryCertificate(ok, True, why, -1.0 - slope, tuple(terms))


# -- fortune decomposition ------------------------------------------------------------------

def decompose_fortune(F: Gauge):
    """Split F as ``kappa o lam`` with ``lam = min(F(t) t^2, t)`` near 0.

    Symbolic input must be a pure power law ``c t^s``; a tabulated F is
    accepted when ``min(F t^2, t)`` is strictly increasing on its table.
    """
    if isinstance(F, Tabulated):
        t = np.asarray(F.ts)
        lam_v = np.minimum(np.asarray(F.vs) * t * t, t)
        if np.any(np.diff(lam_v) <= 0):
            raise UnsupportedError("min(F t^2, t) is not strictly increasing on the table")
        lam = Tabulated(tuple(t), tuple(lam_v))
        kappa = Tabulated(tuple(lam_v), tuple(F.vs))
        return kappa, lam
    if not isinstance(F, PowerLog) or F.logpower != 0:
        raise UnsupportedError("constructive fortune decomposition needs a power law c t^s")
    c, s = F.coeff, F.power
    e = s + 2.0
    if e > 1:
        lam = PowerLog(c, e, 0.0)
        kappa = PowerLog(c ** (2.0 / e), s / e, 0.0)
    elif e < 1:
        lam = IDENTITY
        kappa = F
    else:
        m = min(c, 1.0)
        lam = PowerLog(m, 1.0, 0.0)
        kappa = PowerLog(c * m, -1.0, 0.0)
    return kappa, lam


# -- JSON -----------------------------------------------------------------------------------

def from_json(spec) -> Gauge:
    """Parse ``{"power", "log", "coeff"}``, ``{"table": [[t, v], ...]}`` or a number."""
    if isinstance(spec, (int, float)):
        return constant(float(spec))
    if isinstance(spec, str):
        named = {"id": IDENTITY, "identity": IDENTITY, "one": ONE, "t": IDENTITY}
        if spec in named:
            return named[spec]
        raise ValueError(f"unknown gauge name {spec!r}")
    if not isinstance(spec, dict):
        raise ValueError("gauge must be a number, a name or an object")
    if "table" in spec:
        rows = spec["table"]
        return Tabulated(tuple(r[0] for r in rows), tuple(r[1] for r in rows))
    if "compose" in spec:
        outer, inner = spec["compose"]
        return compose(from_json(outer), from_json(inner))
    if "product" in spec:
        return product(*[(from_json(g), e) for g, e in spec["product"]])
    unknown = set(spec) - {"power", "log", "coeff"}
    if unknown:
        raise ValueError(f"unknown gauge keys {sorted(unknown)}")
    return PowerLog(spec.get("coeff", 1.0), spec.get("power", 0.0), spec.get("log", 0.0))
