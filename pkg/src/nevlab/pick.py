"""Pick functions: analytic self-maps of the upper half-plane.

Four forms are supported:

* :class:`NevanlinnaTriple` ``a + b z + int (1/(t-z) - t/(1+t^2)) dmu``,
* :class:`MatrixResolvent` ``<(A - z)^-1 phi, phi>`` for a real symmetric A,
* :class:`MobiusOf` ``(a f + b) / (c f + d)`` with ``ad - bc > 0``,
* :class:`NegativeReciprocal` ``-1/f``.

Every form is callable on scalars or arrays of points with positive
imaginary part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.stats import qmc

from . import quadrature
from .errors import DomainError, SingularityError
from .measures import AtomicComponent, Measure, cauchy_integral

SELF_MAP_SLACK = 1e-12


def _points(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise DomainError("Pick functions are evaluated at points with Im z > 0")
    return z


def _out(val):
    return complex(val) if np.ndim(val) == 0 else val


class PickFunction:
    """Base class; subclasses implement ``_evaluate`` on complex arrays."""

    def __call__(self, z):
        return _out(self._evaluate(_points(z)))

    def singular_points(self):
        """Real points where the boundary behaviour can change abruptly (quadrature hints)."""
        return []

    def triple(self):
        """Equivalent :class:`NevanlinnaTriple` when one is explicitly known, else None."""
        return None


@dataclass(frozen=True)
class NevanlinnaTriple(PickFunction):
    a: float = 0.0
    b: float = 0.0
    mu: Measure | None = None

    def __post_init__(self):
        if not math.isfinite(self.a):
            raise ValueError("a must be a finite real number")
        if not (self.b >= 0 and math.isfinite(self.b)):
            raise ValueError("b must be a nonnegative real number")
        if self.mu is None:
            object.__setattr__(self, "mu", Measure((), "zero"))

    def _evaluate(self, z):
        out = self.a + self.b * z
        if self.mu.components:
            out = out + cauchy_integral(self.mu, z)
        return out

    def singular_points(self):
        return self.mu.breakpoints()

    def triple(self):
        return self


@dataclass(frozen=True, eq=False)
class MatrixResolvent(PickFunction):
    """``z -> <(A - z)^-1 phi, phi>`` through the eigendecomposition of A."""

    A: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        phi = np.array(self.phi, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or phi.shape != (A.shape[0],):
            raise ValueError("A must be square and phi a vector of matching size")
        if np.max(np.abs(A - A.T), initial=0.0) > 1e-12:
            raise ValueError("A must be symmetric")
        if abs(np.linalg.norm(phi) - 1.0) > 1e-12:
            raise ValueError("phi must be a unit vector")
        A.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "phi", phi)

    @cached_property
    def _spectrum(self):
        evals, evecs = np.linalg.eigh(self.A)
        return evals, (evecs.T @ self.phi) ** 2

    def _evaluate(self, z):
        lam, w = self._spectrum
        return (w / (lam - z[..., None])).sum(axis=-1)

    def spectral_measure(self):
        return spectral_measure(*self._spectrum)

    def singular_points(self):
        return list(self._spectrum[0])

    def triple(self):
        lam, w = self._spectrum
        return NevanlinnaTriple(float(np.sum(w * lam / (1 + lam * lam))), 0.0, self.spectral_measure())

    def resolvent_direct(self, z):
        """``<(A - z)^-1 phi, phi>`` by a linear solve (independent check)."""
        n = self.A.shape[0]
        return complex(self.phi @ np.linalg.solve(self.A - z * np.eye(n), self.phi.astype(complex)))


def spectral_measure(evals, weights, name="spectral"):
    """Atomic measure ``sum w_k delta_{lambda_k}``, merging coincident eigenvalues."""
    pairs = {}
    for lam, w in zip(np.asarray(evals, dtype=float), np.asarray(weights, dtype=float)):
        if w > 0:
            key = next((k for k in pairs if abs(k - lam) <= 1e-14 * max(1.0, abs(lam))), lam)
            pairs[key] = pairs.get(key, 0.0) + w
    return Measure((AtomicComponent(tuple(sorted(pairs.items()))),), name)


@dataclass(frozen=True)
class MobiusMap:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.det > 0:
            raise ValueError("Mobius map must have ad - bc > 0")

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        den = self.c * w + self.d
        if np.any(np.abs(den) <= 1e-300):
            raise SingularityError("Mobius denominator vanishes")
        return _out((self.a * w + self.b) / den)

    def singular_at(self, w):
        """True when the map sends ``w`` (possibly ``inf``) to infinity."""
        if w is None or (isinstance(w, complex) and not np.isfinite(abs(w))) or w == math.inf:
            return self.c == 0.0
        return abs(self.c * complex(w) + self.d) <= 1e-12 * max(1.0, abs(self.c * complex(w)), abs(self.d))

    def image_of(self, w):
        """Image of ``w`` including the point at infinity (returned as ``inf``)."""
        if w == math.inf:
            return math.inf if self.c == 0 else self.a / self.c
        if self.singular_at(w):
            return math.inf
        return complex((self.a * w + self.b) / (self.c * w + self.d))

    def inverse(self):
        return MobiusMap(self.d, -self.b, -self.c, self.a)


IDENTITY_MAP = MobiusMap(1.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class MobiusOf(PickFunction):
    M: MobiusMap
    inner: PickFunction

    def _evaluate(self, z):
        w = self.inner._evaluate(z)
        den = self.M.c * w + self.M.d
        if np.any(np.abs(den) <= 1e-300):
            raise SingularityError("Mobius denominator vanishes at the inner value")
        return (self.M.a * w + self.M.b) / den

    def singular_points(self):
        return self.inner.singular_points()


@dataclass(frozen=True)
class NegativeReciprocal(PickFunction):
    inner: PickFunction

    def _evaluate(self, z):
        w = self.inner._evaluate(z)
        if np.any(w == 0):
            raise SingularityError("inner function vanishes")
        return -1.0 / w

    def singular_points(self):
        return self.inner.singular_points()


# -- operations --------------------------------------------------------------------------

def evaluate(f: PickFunction, z):
    return f(z)


def mobius_compose(M: MobiusMap, f: PickFunction) -> PickFunction:
    return MobiusOf(M, f)


def aronszajn_krein(F: PickFunction, alpha: float) -> PickFunction:
    """``F / (1 + alpha F)``, the resolvent function of the rank-one perturbation."""
    return MobiusOf(MobiusMap(1.0, 0.0, float(alpha), 1.0), F)


def rank_one_perturb(A, phi, alpha):
    """``A + alpha <., phi> phi`` and its spectral measure at ``phi``."""
    base = MatrixResolvent(A, phi)
    A_alpha = base.A + alpha * np.outer(base.phi, base.phi)
    A_alpha = 0.5 * (A_alpha + A_alpha.T)
    return A_alpha, MatrixResolvent(A_alpha, base.phi).spectral_measure()


def jacobi_matrix(diagonal, off_diagonal):
    diagonal = np.asarray(diagonal, dtype=float)
    off = np.asarray(off_diagonal, dtype=float)
    if off.shape != (diagonal.size - 1,):
        raise ValueError("off-diagonal must have one entry fewer than the diagonal")
    return np.diag(diagonal) + np.diag(off, 1) + np.diag(off, -1)


def boundary_measure_window(f: PickFunction, tau: float, eps: float, y: float,
                            rtol: float = 1e-9) -> float:
    """``(1/pi) int_{tau-eps}^{tau+eps} Im f(x + iy) dx``; tends to mu(tau-eps, tau+eps)."""
    if not (eps > 0 and y > 0):
        raise ValueError("need eps > 0 and y > 0")
    if y > eps:
        raise ValueError("boundary window needs y <= eps")
    lo, hi = tau - eps, tau + eps
    pts = [p for p in f.singular_points() if lo < p < hi]
    val, _ = quadrature.integrate(lambda x: f(x + 1j * y).imag, lo, hi, rtol=rtol, points=pts)
    return val / math.pi


def check_self_map(f: PickFunction, n: int = 200, seed: int = 0) -> float:
    """Minimum of Im f over a scrambled Halton net of Pi; raises if clearly negative."""
    u = qmc.Halton(d=2, seed=seed).random(n)
    x = np.tan(np.pi * (u[:, 0] - 0.5))
    y = np.exp(12 * u[:, 1] - 6)
    worst = float(np.min(np.asarray(f(x + 1j * y)).imag))
    if worst < -SELF_MAP_SLACK:
        raise ValueError(f"not a self-map of the upper half-plane: Im f = {worst:g}")
    return worst
