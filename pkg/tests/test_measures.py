from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nevlab import corpus
from nevlab import measures as m
from nevlab.errors import DomainError, is_divergent
from nevlab.gauges import IDENTITY, power
from nevlab.quadrature import integrate

DELTA0 = m.dirac(0.0)
LEB = m.lebesgue(-1.0, 1.0)
CANTOR = m.cantor()


# -- frozen examples -----------------------------------------------------------------------------

def test_window_mass_examples():
    assert m.window_mass(DELTA0, 0.0, 0.5) == pytest.approx(1.0)
    assert m.window_mass(LEB, 0.0, 0.25) == pytest.approx(0.5, rel=1e-14)
    assert m.window_mass(CANTOR, 0.0, 1 / 3) == pytest.approx(0.5, abs=1e-12)


def test_window_mass_open_versus_closed():
    mu = m.dirac(1.0)
    assert m.window_mass(mu, 0.0, 1.0) == 0.0
    assert m.window_mass(mu, 0.0, 1.0, closed=True) == 1.0


def test_poisson_extension_examples():
    assert m.poisson_extension(DELTA0, 0.0, 1.0) == pytest.approx(1.0)
    assert m.poisson_extension(LEB, 0.0, 1.0) == pytest.approx(math.pi / 2, rel=1e-13)
    assert m.poisson_extension(DELTA0, 1.0, 1.0) == pytest.approx(0.5)


def test_cauchy_integral_examples():
    assert m.cauchy_integral(DELTA0, 1j) == pytest.approx(1j)
    assert m.cauchy_integral(LEB, 1j) == pytest.approx(1j * math.pi / 2, abs=1e-13)
    assert m.cauchy_integral(m.atoms([(1.0, 2.0)]), 1j) == pytest.approx(1j, abs=1e-14)


def test_cauchy_integral_rejects_real_axis():
    with pytest.raises(DomainError):
        m.cauchy_integral(LEB, 0.3)


def test_lebesgue_line_is_pi_y():
    mu = m.lebesgue_line()
    for y in (1e-3, 0.5, 4.0):
        assert m.poisson_extension(mu, 0.7, y) == pytest.approx(math.pi)


def test_layer_cake_examples():
    assert abs(m.layer_cake_residual(LEB, power(0.5), 0.0)) < 1e-6
    sides = m.layer_cake_sides(LEB, power(0.5), 0.0)
    assert sides.left == pytest.approx(4.0, rel=1e-8)
    assert abs(m.layer_cake_residual(m.dirac(0.5), IDENTITY, 0.0)) < 1e-6
    assert m.layer_cake_sides(m.dirac(0.5), IDENTITY, 0.0).left == pytest.approx(2.0)


def test_layer_cake_divergence_on_both_sides():
    sides = m.layer_cake_sides(DELTA0, IDENTITY, 0.0)
    assert is_divergent(sides.left) and is_divergent(sides.right)
    sides = m.layer_cake_sides(m.lebesgue(-1, 1), power(1.0), 0.0)
    assert is_divergent(sides.left) and is_divergent(sides.right)


# -- components against independent quadrature --------------------------------------------------

def _poisson_by_quadrature(density, lo, hi, x, y):
    val, _ = integrate(lambda t: density(t) * y / ((t - x) ** 2 + y ** 2), lo, hi, rtol=1e-12, points=[x])
    return val


def test_density_piece_poisson_matches_quadrature():
    mu = m.Measure((m.DensityComponent((-1.0, 0.0, 1.0), ((1.0, 1.0), (1.0, 0.0, -0.5, 0.25))),))
    dens = lambda t: np.where(t < 0, 1 + t, 1 - 0.5 * t ** 2 + 0.25 * t ** 3)
    for x, y in [(0.1, 0.3), (-0.7, 1e-3), (2.0, 0.5)]:
        assert m.poisson_extension(mu, x, y) == pytest.approx(_poisson_by_quadrature(dens, -1, 1, x, y), rel=1e-9)


def test_power_density_poisson_matches_quadrature():
    mu = m.power_density(0.5)
    for x, y in [(0.0, 0.1), (0.3, 1e-2), (-0.9, 0.05)]:
        ref, _ = integrate(lambda t: np.sqrt(np.abs(t)) * y / ((t - x) ** 2 + y ** 2), -1, 1,
                           rtol=1e-12, points=[0.0, x])
        assert m.poisson_extension(mu, x, y) == pytest.approx(ref, rel=1e-8)


def test_cantor_moments_and_symmetry():
    comp = CANTOR.components[0]
    mom = comp.moments(3)
    # mean 1/2 and second moment 3/8 of the middle-thirds Cantor measure
    assert mom[1] == pytest.approx(0.5, rel=1e-14)
    assert mom[2] == pytest.approx(3 / 8, rel=1e-14)
    assert m.poisson_extension(CANTOR, 0.5 + 0.1, 0.2) == pytest.approx(m.poisson_extension(CANTOR, 0.5 - 0.1, 0.2),
                                                                       rel=1e-10)


def test_cantor_window_scaling():
    for k in range(1, 8):
        assert m.window_mass(CANTOR, 0.0, 3.0 ** -k * (1 + 1e-9)) == pytest.approx(2.0 ** -k, rel=1e-9)


def test_window_integral_matches_direct_average():
    mu = corpus.mixed_measure()
    a, b, y = -0.2, 0.35, 0.01
    f = lambda x: np.array([m.poisson_extension(mu, xi, y) for xi in np.atleast_1d(x)])
    ref, _ = integrate(f, a, b, rtol=1e-11, points=[0.0, 1 / 3])
    assert m.poisson_window_integral(mu, a, b, y) == pytest.approx(ref, rel=1e-8)


def test_infinite_window_rejected():
    with pytest.raises(ValueError):
        m.poisson_window_integral(LEB, -math.inf, 0.0, 0.1)


# -- invariants ---------------------------------------------------------------------------------

MEASURES = list(corpus.measures().values())


@given(st.sampled_from(MEASURES), st.floats(-2, 2), st.floats(1e-4, 10))
def test_poisson_is_im_cauchy(mu, x, y):
    p = m.poisson_extension(mu, x, y)
    c = m.cauchy_integral(mu, x + 1j * y)
    assert p >= 0
    assert c.imag == pytest.approx(p, rel=1e-10, abs=1e-300)


@given(st.sampled_from(MEASURES), st.floats(-1.5, 1.5), st.floats(1e-3, 1.0), st.floats(1e-3, 1.0))
def test_window_mass_monotone(mu, tau, e1, e2):
    lo, hi = sorted((e1, e2))
    assert m.window_mass(mu, tau, lo) <= m.window_mass(mu, tau, hi) + 1e-12
    assert m.window_mass(mu, tau, hi) <= mu.total_mass() + 1e-12


@given(st.sampled_from(MEASURES), st.floats(0.1, 5.0), st.floats(-1, 1), st.floats(1e-3, 2.0))
def test_scaling_is_linear(mu, c, x, y):
    assert m.poisson_extension(mu.scaled(c), x, y) == pytest.approx(c * m.poisson_extension(mu, x, y), rel=1e-12)


@given(st.floats(-1, 1), st.floats(1e-3, 2.0))
def test_sum_is_additive(x, y):
    a, b = LEB, CANTOR
    assert m.poisson_extension(a + b, x, y) == pytest.approx(
        m.poisson_extension(a, x, y) + m.poisson_extension(b, x, y), rel=1e-12)
