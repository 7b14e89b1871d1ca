"""Positive Borel measures on the real line and their transforms.

A :class:`Measure` is a finite sum of components:

* :class:`AtomicComponent`  -- finitely many point masses,
* :class:`DensityComponent` -- piecewise-polynomial density (degree <= 3),
* :class:`PowerDensityComponent` -- ``c |t - t0|**p`` on a symmetric window,
* :class:`SelfSimilarComponent` -- invariant measure of a contracting IFS,
* :class:`LebesgueLine` -- ``c dt`` on all of the real line.

Atoms and polynomial pieces use closed-form log/arctan antiderivatives.  Power
and self-similar components are integrated by walking a cell tree: a cell is
refined until it is far (relative to its size) from every singularity of the
kernel, and is then integrated with a Gauss rule of the component restricted
to that cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _ifs, quadrature
from .errors import DivergentValue, NumericError, is_divergent

# A cell is accepted once every kernel singularity is this many half-widths away.
KAPPA = 3.0
RULE_SIZE = 10
MAX_TREE_LEVELS = 4000
SELF_SIMILAR_MASS_TOL = 1e-12
DIVERGENCE_CAP = 1e12


def _as_complex(z):
    return np.asarray(z, dtype=complex)


def _window_kernel(t, a, b, y):
    """arctan((b - t)/y) - arctan((a - t)/y), stable for tiny y."""
    t = np.asarray(t, dtype=float)
    return np.arctan2((b - a) * y, y * y + (b - t) * (a - t))


def _tree_walk(roots, npts, geometry, rule, split, decide, kernel, dtype=float):
    """Sum ``kernel`` against a component over a cell tree, for ``npts`` targets.

    ``decide(cells, lo, hi, idx)`` returns ``(accept, drop)`` masks; any other
    (cell, target) pair is split.  Returns the per-target sums.
    """
    out = np.zeros(npts, dtype=dtype)
    cells = np.repeat(roots, npts, axis=0) if npts else roots[:0]
    idx = np.tile(np.arange(npts), roots.shape[0])
    for _ in range(MAX_TREE_LEVELS):
        if idx.size == 0:
            return out
        lo, hi = geometry(cells)
        accept, drop = decide(cells, lo, hi, idx)
        if accept.any():
            t, w = rule(cells[accept])
            vals = (w * kernel(t, idx[accept])).sum(axis=1)
            if dtype is complex:
                out += np.bincount(idx[accept], weights=vals.real, minlength=npts)
                out += 1j * np.bincount(idx[accept], weights=vals.imag, minlength=npts)
            else:
                out += np.bincount(idx[accept], weights=vals, minlength=npts)
        keep = ~(accept | drop)
        if not keep.any():
            return out
        children, parent = split(cells[keep])
        idx = idx[keep][parent]
        cells = children
    raise NumericError("cell tree did not terminate", partial=float(np.sum(np.abs(out))))


def _far_from(sing):
    """Acceptance rule: every singularity at least KAPPA half-widths from the cell centre."""
    sing = np.atleast_2d(sing)

    def decide(cells, lo, hi, idx):
        centre = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        dist = np.min(np.abs(sing[idx] - centre[:, None]), axis=1)
        accept = dist >= KAPPA * half
        return accept, np.zeros_like(accept)
    return decide


def _inside_interval(lo_t, hi_t, tiny):
    """Cells wholly inside [lo_t, hi_t] are accepted, disjoint ones dropped.

    Straddling cells of mass below ``tiny`` are also dropped; their mass is the
    only unresolved part.
    """
    def decide(cells, lo, hi, idx):
        a, b = lo_t[idx], hi_t[idx]
        accept = (lo >= a) & (hi <= b)
        drop = (hi <= a) | (lo >= b)
        drop |= ~accept & ~drop & (cells[:, -1] < tiny)
        return accept, drop
    return decide


@dataclass(frozen=True)
class AtomicComponent:
    """Finite sum of point masses ``sum m_k delta_{x_k}``."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        atoms = tuple((float(x), float(m)) for x, m in self.atoms)
        if not atoms:
            raise ValueError("atomic component needs at least one atom")
        locs = [x for x, _ in atoms]
        if any(m <= 0 for _, m in atoms):
            raise ValueError("atom masses must be positive")
        if any(not math.isfinite(x) for x in locs):
            raise ValueError("atom locations must be finite")
        if any(b <= a for a, b in zip(locs, locs[1:])):
            raise ValueError("atom locations must be strictly increasing")
        object.__setattr__(self, "atoms", atoms)

    @cached_property
    def locations(self):
        return np.array([x for x, _ in self.atoms])

    @cached_property
    def masses(self):
        return np.array([m for _, m in self.atoms])

    def total_mass(self):
        return float(self.masses.sum())

    def support(self):
        return float(self.locations[0]), float(self.locations[-1])

    def breakpoints(self):
        return list(self.locations)

    def mass_in(self, lo, hi, closed=False):
        lo = np.asarray(lo, dtype=float)[..., None]
        hi = np.asarray(hi, dtype=float)[..., None]
        x = self.locations
        inside = (x >= lo) & (x <= hi) if closed else (x > lo) & (x < hi)
        return (inside * self.masses).sum(axis=-1)

    def cauchy_raw(self, z):
        z = _as_complex(z)
        return (self.masses / (self.locations - z[..., None])).sum(axis=-1)

    def window_integral(self, a, b, y):
        return float(self.masses @ _window_kernel(self.locations, a, b, y))

    def radial_integral(self, g, tau, r0, r1):
        d = np.abs(self.locations - tau)
        sel = (d > r0) & (d <= r1)
        return float((self.masses[sel] * g(d[sel])).sum()) if sel.any() else 0.0

    def mass_at(self, point):
        hit = self.locations == point
        return float(self.masses[hit].sum())


@dataclass(frozen=True)
class DensityComponent:
    """Piecewise-polynomial density.

    ``pieces[j]`` holds ascending coefficients in ``t`` (not in a local
    variable) of the density on ``[breakpoints[j], breakpoints[j+1]]``.
    """

    breakpoints: tuple[float, ...]
    pieces: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        pieces = tuple(tuple(float(c) for c in p) for p in self.pieces)
        if len(bp) < 2 or any(b <= a for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing (at least two)")
        if not all(math.isfinite(b) for b in bp):
            raise ValueError("density support must be compact")
        if len(pieces) != len(bp) - 1:
            raise ValueError("need one coefficient list per interval")
        for j, coeffs in enumerate(pieces):
            if not 1 <= len(coeffs) <= 4:
                raise ValueError("polynomial pieces must have degree <= 3")
            a, b = bp[j], bp[j + 1]
            cheb = np.cos(np.pi * (np.arange(16) + 0.5) / 16)
            ts = np.concatenate([[a, b], 0.5 * (a + b) + 0.5 * (b - a) * cheb])
            vals = np.polynomial.polynomial.polyval(ts, coeffs)
            scale = max(1.0, np.max(np.abs(coeffs)))
            if np.min(vals) < -1e-13 * scale:
                raise ValueError(f"density piece {j} is negative on [{a}, {b}]")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "pieces", pieces)

    def _intervals(self):
        return zip(self.breakpoints[:-1], self.breakpoints[1:], self.pieces)

    def total_mass(self):
        return float(self.mass_in(self.breakpoints[0], self.breakpoints[-1], closed=True))

    def support(self):
        return self.breakpoints[0], self.breakpoints[-1]

    def mass_in(self, lo, hi, closed=False):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        total = np.zeros(np.broadcast(lo, hi).shape)
        P = np.polynomial.polynomial
        for a, b, coeffs in self._intervals():
            anti = P.polyint(coeffs)
            left = np.clip(lo, a, b)
            right = np.clip(hi, a, b)
            total = total + np.where(right > left, P.polyval(right, anti) - P.polyval(left, anti), 0.0)
        return total

    @staticmethod
    def _taylor(coeffs, z):
        """Coefficients of the polynomial re-expanded around each z."""
        P = np.polynomial.polynomial
        out = []
        c = np.asarray(coeffs, dtype=float)
        for k in range(len(coeffs)):
            out.append(P.polyval(z, c) / math.factorial(k))
            c = P.polyder(c) if c.size > 1 else np.zeros(1)
        return out

    def cauchy_raw(self, z):
        z = _as_complex(z)
        total = np.zeros(z.shape, dtype=complex)
        for a, b, coeffs in self._intervals():
            c = self._taylor(coeffs, z)
            wa, wb = a - z, b - z
            total += c[0] * (np.log(wb) - np.log(wa))
            for k in range(1, len(c)):
                total += c[k] * (wb ** k - wa ** k) / k
        return total

    def _log_antiderivative(self, z):
        """F(z) = -int P(t) log(t - z) dt over the support, so F'(z) = cauchy_raw(z)."""
        z = _as_complex(z)
        total = np.zeros(z.shape, dtype=complex)
        for a, b, coeffs in self._intervals():
            c = self._taylor(coeffs, z)
            for k, ck in enumerate(c):
                n = k + 1
                wa, wb = a - z, b - z
                gb = wb ** n * (np.log(wb) / n - 1.0 / n ** 2)
                ga = wa ** n * (np.log(wa) / n - 1.0 / n ** 2)
                total -= ck * (gb - ga)
        return total

    def window_integral(self, a, b, y):
        # Im F(b+iy) - Im F(a+iy) = int P(t) [arctan((b-t)/y) - arctan((a-t)/y)] dt
        F = self._log_antiderivative(np.array([b + 1j * y, a + 1j * y]))
        return float((F[0] - F[1]).imag)

    def radial_integral(self, g, tau, r0, r1):
        total = 0.0
        for a, b, coeffs in self._intervals():
            for lo, hi in ((tau - r1, tau - r0), (tau + r0, tau + r1)):
                left, right = max(lo, a), min(hi, b)
                if right > left:
                    f = lambda t, _c=coeffs: np.polynomial.polynomial.polyval(t, _c) * g(np.abs(t - tau))
                    total += quadrature.integrate(f, left, right, rtol=1e-13, atol=1e-300)[0]
        return total

    def mass_at(self, point):
        return 0.0


@dataclass(frozen=True)
class PowerDensityComponent:
    """Density ``coeff * |t - center|**exponent`` on ``[center - radius, center + radius]``."""

    center: float
    radius: float
    exponent: float
    coeff: float = 1.0

    def __post_init__(self):
        if not self.exponent > -1:
            raise ValueError("power density needs exponent > -1 to be locally finite")
        if not (self.radius > 0 and self.coeff > 0):
            raise ValueError("power density needs positive radius and coefficient")

    @cached_property
    def _jacobi(self):
        return quadrature.gauss_jacobi_unit(RULE_SIZE, self.exponent)

    @cached_property
    def _legendre(self):
        return quadrature.gauss_legendre(RULE_SIZE)

    def total_mass(self):
        return 2.0 * self.coeff * self.radius ** (self.exponent + 1) / (self.exponent + 1)

    def support(self):
        return self.center - self.radius, self.center + self.radius

    def breakpoints(self):
        return [self.center - self.radius, self.center, self.center + self.radius]

    def _radial_mass(self, u0, u1):
        p1 = self.exponent + 1
        return self.coeff * (u1 ** p1 - u0 ** p1) / p1

    def mass_in(self, lo, hi, closed=False):
        lo = np.asarray(lo, dtype=float) - self.center
        hi = np.asarray(hi, dtype=float) - self.center
        r = self.radius
        right = self._radial_mass(np.clip(lo, 0, r), np.clip(hi, 0, r))
        left = self._radial_mass(np.clip(-hi, 0, r), np.clip(-lo, 0, r))
        return np.where(hi > lo, right + left, 0.0)

    # Cells are rows (side, u0, u1, mass): t = center + side * u with u in [u0, u1].
    def _roots(self):
        m = self._radial_mass(0.0, self.radius)
        return np.array([[1.0, 0.0, self.radius, m], [-1.0, 0.0, self.radius, m]])

    def _geometry(self, cells):
        a = self.center + cells[:, 0] * cells[:, 1]
        b = self.center + cells[:, 0] * cells[:, 2]
        return np.minimum(a, b), np.maximum(a, b)

    def _rule(self, cells):
        side, u0, u1 = cells[:, 0:1], cells[:, 1:2], cells[:, 2:3]
        core = u0[:, 0] == 0.0
        p = self.exponent
        ju, jw = self._jacobi
        lx, lw = self._legendre
        u = np.where(core[:, None], u1 * ju[None, :], 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * lx[None, :])
        w_core = jw[None, :] * u1 ** (p + 1)
        w_shell = 0.5 * (u1 - u0) * lw[None, :] * np.where(core[:, None], 1.0, u) ** p
        w = self.coeff * np.where(core[:, None], w_core, w_shell)
        return self.center + side * u, w

    def _split(self, cells):
        mid = 0.5 * (cells[:, 1] + cells[:, 2])
        left = cells.copy()
        right = cells.copy()
        left[:, 2] = mid
        right[:, 1] = mid
        left[:, 3] = self._radial_mass(left[:, 1], left[:, 2])
        right[:, 3] = self._radial_mass(right[:, 1], right[:, 2])
        n = cells.shape[0]
        return np.concatenate([left, right]), np.concatenate([np.arange(n), np.arange(n)])

    def _walk(self, npts, decide, kernel, dtype=float):
        return _tree_walk(self._roots(), npts, self._geometry, self._rule, self._split,
                          decide, kernel, dtype)

    def cauchy_raw(self, z):
        z = _as_complex(z)
        flat = z.ravel()
        out = self._walk(flat.size, _far_from(flat[:, None]),
                         lambda t, i: 1.0 / (t - flat[i][:, None]), complex)
        return out.reshape(z.shape)

    def window_integral(self, a, b, y):
        sing = np.array([[a + 1j * y, b + 1j * y]])
        return float(self._walk(1, _far_from(sing), lambda t, i: _window_kernel(t, a, b, y))[0])

    def radial_integral(self, g, tau, r0, r1):
        total = 0.0
        c, p = self.center, self.exponent
        for lo, hi in ((tau - r1, tau - r0), (tau + r0, tau + r1)):
            left, right = max(lo, c - self.radius), min(hi, c + self.radius)
            if right <= left:
                continue
            pieces = [(left, c), (c, right)] if left < c < right else [(left, right)]
            for s, e in pieces:
                f = lambda t: self.coeff * np.abs(t - c) ** p * g(np.abs(t - tau))
                total += quadrature.integrate(f, s, e, rtol=1e-12, atol=1e-300)[0]
        return total

    def mass_at(self, point):
        return 0.0


@dataclass(frozen=True)
class SelfSimilarComponent:
    """Invariant measure of the IFS ``t -> ratio_j * t + offset_j`` with weights ``p_j``.

    ``support`` is an interval mapped into itself by every map; the images must
    be pairwise disjoint.  The standard Cantor measure is
    ``maps=((1/3, 0), (1/3, 2/3)), weights=(1/2, 1/2), support=(0, 1)``.
    """

    maps: tuple[tuple[float, float], ...]
    weights: tuple[float, ...]
    support_interval: tuple[float, float] = (0.0, 1.0)
    total: float = 1.0

    def __post_init__(self):
        maps = tuple((float(r), float(b)) for r, b in self.maps)
        weights = tuple(float(w) for w in self.weights)
        lo, hi = (float(v) for v in self.support_interval)
        if len(maps) < 2 or len(maps) != len(weights):
            raise ValueError("need at least two maps and one weight per map")
        if any(not 0 < r < 1 for r, _ in maps):
            raise ValueError("IFS ratios must lie in (0, 1)")
        if any(w <= 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError("IFS weights must be positive and sum to 1")
        if not (hi > lo and self.total > 0):
            raise ValueError("support must be a nondegenerate interval and total mass positive")
        images = sorted((r * lo + b, r * hi + b) for r, b in maps)
        slack = 1e-12 * (hi - lo)
        for (a0, a1), (b0, b1) in zip(images, images[1:]):
            if b0 <= a1:
                raise ValueError("IFS images must be pairwise disjoint")
        if images[0][0] < lo - slack or images[-1][1] > hi + slack:
            raise ValueError("IFS images must lie inside the support interval")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "support_interval", (lo, hi))

    @property
    def dimension(self):
        """Similarity dimension for equal ratios and weights (log n / log(1/r))."""
        r = self.maps[0][0]
        return math.log(len(self.maps)) / math.log(1.0 / r)

    def total_mass(self):
        return self.total

    def support(self):
        return self.support_interval

    def breakpoints(self):
        return list(self.support_interval)

    @cached_property
    def _ratios(self):
        return np.array([r for r, _ in self.maps])

    @cached_property
    def _offsets(self):
        return np.array([b for _, b in self.maps])

    @cached_property
    def _probs(self):
        return np.array(self.weights)

    def moments(self, n):
        """Exact moments of the normalised invariant measure, degrees 0..n-1."""
        m = np.zeros(n)
        m[0] = 1.0
        r, b, w = self._ratios, self._offsets, self._probs
        for k in range(1, n):
            rhs = sum(math.comb(k, i) * float(np.sum(w * r ** i * b ** (k - i))) * m[i] for i in range(k))
            m[k] = rhs / (1.0 - float(np.sum(w * r ** k)))
        return m

    def _discretise(self, points, masses, depth):
        for _ in range(depth):
            points = (self._ratios[:, None] * points[None, :] + self._offsets[:, None]).ravel()
            masses = (self._probs[:, None] * masses[None, :]).ravel()
        return points, masses

    @cached_property
    def _rule_unit(self):
        """Gauss rule of the normalised invariant measure (nodes in t, weights sum to 1)."""
        k = len(self.maps)
        mean = self.moments(2)[1]
        d1 = max(1, int(math.log(60000) / math.log(k)))
        pts, ms = self._discretise(np.array([mean]), np.array([1.0]), d1)
        nodes, weights = quadrature.gauss_from_discrete(pts, ms, RULE_SIZE)
        d2 = max(1, int(math.log(3000) / math.log(k)))
        pts, ms = self._discretise(nodes, weights, d2)
        return quadrature.gauss_from_discrete(pts, ms, RULE_SIZE)

    # Cells are rows (shift, scale, mass): the image of the support under t -> shift + scale t.
    def _roots(self):
        return np.array([[0.0, 1.0, self.total]])

    def _geometry(self, cells):
        lo, hi = self.support_interval
        return cells[:, 0] + cells[:, 1] * lo, cells[:, 0] + cells[:, 1] * hi

    def _rule(self, cells):
        nodes, weights = self._rule_unit
        t = cells[:, 0:1] + cells[:, 1:2] * nodes[None, :]
        return t, cells[:, 2:3] * weights[None, :]

    def _split(self, cells):
        k = len(self.maps)
        shift = cells[:, 0:1] + cells[:, 1:2] * self._offsets[None, :]
        scale = cells[:, 1:2] * self._ratios[None, :]
        mass = cells[:, 2:3] * self._probs[None, :]
        children = np.stack([shift.ravel(), scale.ravel(), mass.ravel()], axis=1)
        return children, np.repeat(np.arange(cells.shape[0]), k)

    def _walk(self, npts, decide, kernel, dtype=float):
        return _tree_walk(self._roots(), npts, self._geometry, self._rule, self._split,
                          decide, kernel, dtype)

    def mass_in(self, lo, hi, closed=False, tol=SELF_SIMILAR_MASS_TOL):
        # The measure has no atoms, so open and closed windows agree.
        lo_a, hi_a = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
        shape = lo_a.shape
        lo_f, hi_f = lo_a.ravel(), hi_a.ravel()
        decide = _inside_interval(lo_f, hi_f, tol)
        resolved = self._walk(lo_f.size, decide, lambda t, i: np.ones_like(t))
        # Straddling cells dropped below the tolerance: count half of their mass.
        unresolved = self._unresolved(lo_f, hi_f, tol)
        return (resolved + 0.5 * unresolved).reshape(shape)

    def _unresolved(self, lo, hi, tol):
        out = np.zeros(lo.size)
        cells = np.repeat(self._roots(), lo.size, axis=0)
        idx = np.arange(lo.size)
        for _ in range(MAX_TREE_LEVELS):
            if idx.size == 0:
                break
            c0, c1 = self._geometry(cells)
            a, b = lo[idx], hi[idx]
            straddle = ~((c0 >= a) & (c1 <= b)) & ~((c1 <= a) | (c0 >= b))
            small = straddle & (cells[:, 2] < tol)
            out += np.bincount(idx[small], weights=cells[small, 2], minlength=lo.size)
            keep = straddle & ~small
            if not keep.any():
                break
            cells, parent = self._split(cells[keep])
            idx = idx[keep][parent]
        return out

    def mass_in_depth(self, lo, hi, depth):
        """Window mass after exactly ``depth`` IFS levels: ``(estimate, unresolved mass)``."""
        cells = self._roots()
        resolved = 0.0
        for level in range(depth + 1):
            c0, c1 = self._geometry(cells)
            inside = (c0 >= lo) & (c1 <= hi)
            outside = (c1 <= lo) | (c0 >= hi)
            resolved += cells[inside, 2].sum()
            straddle = cells[~inside & ~outside]
            if level == depth or straddle.size == 0:
                unresolved = straddle[:, 2].sum() if straddle.size else 0.0
                return resolved + 0.5 * unresolved, unresolved
            cells, _ = self._split(straddle)

    def cauchy_raw(self, z):
        z = _as_complex(z)
        flat = z.ravel()
        nodes, weights = self._rule_unit
        lo, hi = self.support_interval
        re, im = _ifs.cauchy_walk(np.ascontiguousarray(flat.real), np.ascontiguousarray(flat.imag),
                                  self._ratios, self._offsets, self._probs, lo, hi, self.total,
                                  nodes, weights, KAPPA)
        return (re + 1j * im).reshape(z.shape)

    def window_integral(self, a, b, y):
        sing = np.array([[a + 1j * y, b + 1j * y]])
        return float(self._walk(1, _far_from(sing), lambda t, i: _window_kernel(t, a, b, y))[0])

    def radial_integral(self, g, tau, r0, r1):
        lo = np.array([tau - r1, tau + r0])
        hi = np.array([tau - r0, tau + r1])
        tiny = 1e-17 * self.total
        decide_in = _inside_interval(lo, hi, tiny)

        def decide(cells, c0, c1, idx):
            accept, drop = decide_in(cells, c0, c1, idx)
            # Accepted cells must also be small compared with their distance to tau.
            centre, half = 0.5 * (c0 + c1), 0.5 * (c1 - c0)
            accept &= np.abs(centre - tau) >= KAPPA * half
            return accept, drop
        vals = self._walk(2, decide, lambda t, i: g(np.abs(t - tau)))
        return float(vals.sum())

    def mass_at(self, point):
        return 0.0


@dataclass(frozen=True)
class LebesgueLine:
    """``density * dt`` on the whole line; its transform is the constant ``i*pi*density``."""

    density: float = 1.0

    def __post_init__(self):
        if not self.density > 0:
            raise ValueError("density must be positive")

    def total_mass(self):
        return math.inf

    def support(self):
        return -math.inf, math.inf

    def breakpoints(self):
        return []

    def mass_in(self, lo, hi, closed=False):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        return np.where(hi > lo, self.density * (hi - lo), 0.0)

    def window_integral(self, a, b, y):
        return math.pi * self.density * (b - a)

    def radial_integral(self, g, tau, r0, r1):
        f = lambda r: self.density * g(r)
        return 2.0 * quadrature.integrate(f, r0, r1, rtol=1e-13, atol=1e-300)[0]

    def mass_at(self, point):
        return 0.0


COMPONENT_TYPES = (AtomicComponent, DensityComponent, PowerDensityComponent,
                   SelfSimilarComponent, LebesgueLine)


@dataclass(frozen=True)
class Measure:
    """Finite sum of measure components with a label."""

    components: tuple = ()
    name: str = ""

    def __post_init__(self):
        comps = tuple(self.components)
        for c in comps:
            if not isinstance(c, COMPONENT_TYPES):
                raise TypeError(f"unsupported measure component {type(c).__name__}")
        object.__setattr__(self, "components", comps)

    @property
    def compact(self):
        return not any(isinstance(c, LebesgueLine) for c in self.components)

    @property
    def line_density(self):
        return sum(c.density for c in self.components if isinstance(c, LebesgueLine))

    def total_mass(self):
        return float(sum(c.total_mass() for c in self.components))

    def breakpoints(self):
        pts = []
        for c in self.components:
            if isinstance(c, DensityComponent):
                pts.extend(c.breakpoints)
            else:
                pts.extend(c.breakpoints())
        return sorted(set(pts))

    def mass_at(self, point):
        return float(sum(c.mass_at(point) for c in self.components))

    def cauchy_raw(self, z):
        """int dmu(t)/(t - z) over the compact components."""
        z = _as_complex(z)
        out = np.zeros(z.shape, dtype=complex)
        for c in self.components:
            if not isinstance(c, LebesgueLine):
                out = out + c.cauchy_raw(z)
        return out

    @cached_property
    def normalisation(self):
        """int t/(1+t^2) dmu = Re int dmu/(t - i); the real shift in the Nevanlinna formula."""
        return float(self.cauchy_raw(np.array([1j]))[0].real)

    def __add__(self, other):
        return Measure(self.components + other.components, self.name or other.name)

    def scaled(self, factor):
        """Return ``factor * self`` (factor > 0)."""
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        out = []
        for c in self.components:
            if isinstance(c, AtomicComponent):
                out.append(AtomicComponent(tuple((x, m * factor) for x, m in c.atoms)))
            elif isinstance(c, DensityComponent):
                out.append(DensityComponent(c.breakpoints, tuple(tuple(v * factor for v in p) for p in c.pieces)))
            elif isinstance(c, PowerDensityComponent):
                out.append(PowerDensityComponent(c.center, c.radius, c.exponent, c.coeff * factor))
            elif isinstance(c, SelfSimilarComponent):
                out.append(SelfSimilarComponent(c.maps, c.weights, c.support_interval, c.total * factor))
            else:
                out.append(LebesgueLine(c.density * factor))
        return Measure(tuple(out), self.name)


# -- constructors for the common cases -------------------------------------------------

def dirac(x=0.0, mass=1.0, name=""):
    return Measure((AtomicComponent(((x, mass),)),), name or f"delta_{x:g}")


def atoms(pairs, name="atoms"):
    return Measure((AtomicComponent(tuple(sorted(pairs))),), name)


def lebesgue(lo=-1.0, hi=1.0, density=1.0, name=""):
    return Measure((DensityComponent((lo, hi), ((density,),)),), name or f"lebesgue[{lo:g},{hi:g}]")


def abs_density(lo=-1.0, hi=1.0, name="|t|"):
    """Density |t| on [lo, hi] with lo < 0 < hi."""
    return Measure((DensityComponent((lo, 0.0, hi), ((0.0, -1.0), (0.0, 1.0))),), name)


def power_density(exponent, center=0.0, radius=1.0, coeff=1.0, name=""):
    return Measure((PowerDensityComponent(center, radius, exponent, coeff),),
                   name or f"|t|^{exponent:g}")


def cantor(lo=0.0, hi=1.0, mass=1.0, name="cantor"):
    third = (hi - lo) / 3.0
    maps = ((1 / 3, lo - lo / 3), (1 / 3, lo + 2 * third - lo / 3))
    return Measure((SelfSimilarComponent(maps, (0.5, 0.5), (lo, hi), mass),), name)


def lebesgue_line(density=1.0, name="lebesgue-line"):
    return Measure((LebesgueLine(density),), name)


# -- operations -------------------------------------------------------------------------

def window_mass(mu: Measure, tau: float, eps: float, closed: bool = False):
    """mu((tau - eps, tau + eps)); ``closed=True`` gives mu([tau - eps, tau + eps])."""
    eps_a = np.asarray(eps, dtype=float)
    if np.any(eps_a <= 0):
        raise ValueError("window half-width must be positive")
    total = sum(c.mass_in(tau - eps_a, tau + eps_a, closed=closed) for c in mu.components)
    if np.ndim(total) == 0:
        return float(total)
    return np.asarray(total, dtype=float)


def poisson_extension(mu: Measure, x, y):
    """int y / ((t - x)^2 + y^2) dmu(t), i.e. Im of the Cauchy integral at x + iy."""
    y_a = np.asarray(y, dtype=float)
    if np.any(y_a <= 0):
        raise ValueError("Poisson extension needs y > 0")
    z = np.asarray(x, dtype=float) + 1j * y_a
    val = mu.cauchy_raw(z).imag + math.pi * mu.line_density
    return float(val) if np.ndim(val) == 0 else val


def cauchy_integral(mu: Measure, z):
    """int (1/(t - z) - t/(1 + t^2)) dmu(t) for Im z > 0."""
    z = _as_complex(z)
    if np.any(z.imag <= 0):
        from .errors import DomainError
        raise DomainError("Cauchy integral needs Im z > 0")
    val = mu.cauchy_raw(z) - mu.normalisation + 1j * math.pi * mu.line_density
    return complex(val) if np.ndim(val) == 0 else val


def poisson_window_integral(mu: Measure, a: float, b: float, y: float) -> float:
    """int_a^b poisson_extension(mu, x, y) dx, by the arctan kernel in t.

    Equals ``int [arctan((b - t)/y) - arctan((a - t)/y)] dmu(t)``.
    """
    if y <= 0:
        raise ValueError("need y > 0")
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("window ends must be finite")
    if b <= a:
        return 0.0
    return float(sum(c.window_integral(a, b, y) for c in mu.components))


def poisson_mass_condition(mu: Measure, tau: float = 0.0) -> float:
    """int dmu(t) / (1 + (t - tau)^2), finite for every admissible measure."""
    return poisson_extension(mu, tau, 1.0)


def radial_integral(mu: Measure, g, tau, r0, r1):
    """int over r0 < |t - tau| <= r1 of g(|t - tau|) dmu(t)."""
    return float(sum(c.radial_integral(g, tau, r0, r1) for c in mu.components))


# -- layer-cake identity ------------------------------------------------------------------

@dataclass
class LayerCakeSides:
    left: float
    right: float
    left_terms: list = field(default_factory=list)


STALL_WINDOW = 32


def _stalled(terms):
    """Shell terms that stopped decaying geometrically: the sum diverges (at least like log)."""
    if len(terms) < 2 * STALL_WINDOW:
        return False
    tail = np.asarray(terms[-STALL_WINDOW:], dtype=float)
    if np.any(tail <= 0):
        return False
    slope = np.polyfit(np.arange(tail.size), np.log2(tail), 1)[0]
    return slope > -0.05


def _gamma_vanishes_at_zero(gamma):
    return gamma.limit_at_zero() == 0.0


def layer_cake_sides(mu: Measure, gamma, tau: float = 0.0, cap: float = DIVERGENCE_CAP,
                     max_shells: int = 1000):
    """Both sides of the layer-cake identity on the unit neighbourhood of ``tau``.

    left  = int_{|t-tau|<=1} dmu / gamma(|t - tau|)
    right = mu([tau-1, tau+1]) / gamma(1) + int_0^1 mu([tau-s, tau+s]) gamma'(s) / gamma(s)^2 ds

    Each side is summed over dyadic shells; a side whose partial sum passes
    ``cap``, or whose shell terms stop decaying geometrically, is returned as a
    :class:`DivergentValue`.
    """
    if not gamma.is_increasing():
        raise ValueError("layer-cake identity needs a monotone increasing gamma")
    g1 = float(gamma(1.0))
    if not g1 > 0:
        raise ValueError("gamma must be positive on (0, 1]")
    inv = lambda r: 1.0 / gamma(np.asarray(r, dtype=float))

    atom = mu.mass_at(tau)
    vanishes = _gamma_vanishes_at_zero(gamma)
    left = right = None
    if atom > 0 and vanishes:
        left = DivergentValue(1.0, "atom at tau and gamma(0+) = 0")
    total_left = atom / float(gamma(0.0)) if atom > 0 and not vanishes else 0.0

    shells = [(2.0 ** -(k + 1), 2.0 ** -k) for k in range(max_shells)]
    quiet = 0
    if left is None:
        terms = []
        for r0, r1 in shells:
            term = radial_integral(mu, inv, tau, r0, r1)
            total_left += term
            terms.append(term)
            if total_left > cap:
                left = DivergentValue(1.0, f"partial sum exceeds {cap:g} at radius {r0:.3g}")
                break
            if _stalled(terms):
                left = DivergentValue(1.0, f"shell terms stop decaying near radius {r0:.3g}")
                break
            ball = window_mass(mu, tau, r0, closed=True) - atom
            quiet = quiet + 1 if (term <= 1e-17 * total_left and ball * float(inv(r0)) <= 1e-17 * max(total_left, 1e-300)) else 0
            if quiet >= 3 or ball <= 0.0:
                break
        if left is None:
            left = total_left

    total_right = window_mass(mu, tau, 1.0, closed=True) / g1
    quiet = 0
    terms = []
    pts = sorted({abs(p - tau) for p in mu.breakpoints()} | set(gamma.breakpoints()))
    for r0, r1 in shells:
        f = lambda s: window_mass(mu, tau, s, closed=True) * gamma.derivative(s) / gamma(s) ** 2
        term = quadrature.integrate(f, r0, r1, rtol=1e-11, atol=1e-300,
                                    points=[p for p in pts if r0 < p < r1])[0]
        total_right += term
        terms.append(term)
        if total_right > cap:
            right = DivergentValue(1.0, f"partial sum exceeds {cap:g} at radius {r0:.3g}")
            break
        if _stalled(terms):
            right = DivergentValue(1.0, f"shell terms stop decaying near radius {r0:.3g}")
            break
        ball = window_mass(mu, tau, r0, closed=True)
        bound = ball * float(inv(r0))
        quiet = quiet + 1 if (term <= 1e-17 * total_right and bound <= 1e-17 * max(total_right, 1e-300)) else 0
        if quiet >= 3 or ball <= 0.0:
            break
    if right is None:
        right = float(total_right)
    return LayerCakeSides(left, right)


def layer_cake_residual(mu: Measure, gamma, tau: float = 0.0) -> float:
    """Left minus right side of the layer-cake identity (see :func:`layer_cake_sides`).

    Both sides divergent: ``+sentinel``.  Only the left divergent: ``+sentinel``;
    only the right divergent: ``-sentinel``.
    """
    sides = layer_cake_sides(mu, gamma, tau)
    ld, rd = is_divergent(sides.left), is_divergent(sides.right)
    if ld and rd:
        return DivergentValue(1.0, "both sides diverge")
    if ld:
        return DivergentValue(1.0, "left side diverges, right side finite")
    if rd:
        return DivergentValue(-1.0, "right side diverges, left side finite")
    return float(sides.left - sides.right)
