"""Named measures and Pick functions used by the tests, the CLI and the acceptance suites."""

from __future__ import annotations

import numpy as np

from . import measures as m
from .pick import MatrixResolvent, NevanlinnaTriple, jacobi_matrix


def mixed_measure():
    """Half an atom at 1/2, half of Lebesgue on [-1, 1] and half of the Cantor measure."""
    parts = (m.atoms([(0.5, 0.5)]).components + m.lebesgue(density=0.5).components
             + m.cantor(mass=0.5).components)
    return m.Measure(parts, "mixed")


def measures():
    return {
        "atom": m.dirac(0.0),
        "two-atom": m.atoms([(0.0, 1.0), (0.3, 0.5)], "two-atom"),
        "lebesgue": m.lebesgue(-1.0, 1.0),
        "sqrt-density": m.power_density(0.5, name="|t|^0.5"),
        "cantor": m.cantor(),
        "mixed": mixed_measure(),
    }


def triple(mu, a=0.0, b=0.0):
    return NevanlinnaTriple(a, b, mu)


def identity_plus(a=0.0):
    """``z + a``."""
    return NevanlinnaTriple(a, 1.0, None)


def inverse_z():
    """``-1/z``: the transform of a unit atom at 0."""
    return NevanlinnaTriple(0.0, 0.0, m.dirac(0.0))


def quadratic_density(a=0.5):
    """``a`` plus the transform of the density t^2 on [-1, 1]."""
    return NevanlinnaTriple(a, 0.0, m.Measure((m.DensityComponent((-1.0, 1.0), ((0.0, 0.0, 1.0),)),), "t^2"))


def jacobi_resolvent(n=50, seed=7):
    """Resolvent function ``<(J - z)^-1 e_1, e_1>`` of a reproducible random Jacobi matrix."""
    rng = np.random.default_rng(seed)
    J = jacobi_matrix(rng.uniform(-1, 1, n), rng.uniform(0.5, 1.5, n - 1))
    phi = np.zeros(n)
    phi[0] = 1.0
    return MatrixResolvent(J, phi)
