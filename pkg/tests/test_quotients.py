from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nevlab import corpus
from nevlab import measures as m
from nevlab import quotients as q
from nevlab.errors import DomainError, PreconditionError, UnsupportedError, is_divergent
from nevlab.gauges import IDENTITY, ONE, power
from nevlab.pick import NevanlinnaTriple

Z = corpus.identity_plus(0.0)
INV = corpus.inverse_z()
LINE = NevanlinnaTriple(0.0, 0.0, m.lebesgue_line())
LEB = corpus.triple(m.lebesgue(-1, 1))


def test_julia_fatou_examples():
    assert q.julia_fatou(Z, IDENTITY, 0.4 + 0.7j) == pytest.approx(1.0)
    assert q.julia_fatou(INV, IDENTITY, 0.25j) == pytest.approx(16.0)
    assert q.julia_fatou(Z, ONE, 2.0 + 0.3j) == pytest.approx(0.3)
    with pytest.raises(DomainError):
        q.julia_fatou(Z, ONE, 1.0)


def test_direct_examples():
    assert q.averaged_quotient_direct(Z, ONE, IDENTITY, 0.0, 0.1) == pytest.approx(0.1, rel=1e-12)
    assert q.averaged_quotient_direct(INV, ONE, IDENTITY, 0.0, 0.1) == pytest.approx(7.853981633974483, rel=1e-9)


@pytest.mark.parametrize("eps", [0.3, 0.01, 1e-4])
def test_lebesgue_line_average_is_pi(eps):
    # Im f = pi for every height, so the average over any window is pi
    for method in ("kernel", "direct"):
        assert q.averaged_quotient(LINE, ONE, IDENTITY, 0.2, eps, method) == pytest.approx(math.pi, rel=1e-9)


def test_kernel_examples():
    for eps in (0.5, 0.1, 1e-3, 1e-6):
        assert q.averaged_quotient_kernel(INV, ONE, IDENTITY, 0.0, eps) == pytest.approx(math.pi / (4 * eps), rel=1e-13)
    assert q.averaged_quotient_kernel(Z, ONE, IDENTITY, 0.0, 0.1) == pytest.approx(0.1, rel=1e-14)
    lam = power(2.0)
    k = q.averaged_quotient_kernel(LEB, ONE, lam, 0.0, 0.05)
    d = q.averaged_quotient_direct(LEB, ONE, lam, 0.0, 0.05)
    assert k == pytest.approx(d, rel=1e-8)


def test_kernel_needs_triple():
    from nevlab.pick import NegativeReciprocal
    with pytest.raises(UnsupportedError):
        q.averaged_quotient_kernel(NegativeReciprocal(LEB), ONE, IDENTITY, 0.0, 0.1)


def test_augur_examples():
    consts = (math.atan(1.0), math.pi, 1.0)
    ab = q.augur_bounds(m.dirac(0.0), 0.0, ONE, IDENTITY, 0.0, 0.1, consts)
    assert ab.lower == pytest.approx((math.pi / 4) / 0.1)
    assert ab.lower == pytest.approx(q.averaged_quotient_kernel(INV, ONE, IDENTITY, 0.0, 0.1))
    zero = m.Measure(())
    ab = q.augur_bounds(zero, 1.0, ONE, IDENTITY, 0.0, 0.1, consts)
    assert ab.lower == 0.0 <= q.averaged_quotient_kernel(Z, ONE, IDENTITY, 0.0, 0.1)


@pytest.mark.parametrize("alpha,beta", [(1.0, 0.0), (1.5, 0.5), (2.0, 0.25)])
def test_augur_tail_exponent(alpha, beta):
    lam, kappa = power(alpha), power(beta)
    consts = (1.0, 1.0, 1.0)
    grid = q.dyadic_grid(0.125, 10)
    tails = [q.augur_bounds(m.dirac(0.5), 0.0, kappa, lam, 0.0, e, consts).upper_tail_term for e in grid]
    slope = np.polyfit(np.log(grid), np.log(tails), 1)[0]
    assert slope == pytest.approx(alpha * (1 - beta) - 2, abs=1e-10)


def test_augur_precondition_names_hypothesis():
    with pytest.raises(PreconditionError) as info:
        q.augur_bounds(m.dirac(0.0), 0.0, ONE, power(0.5), 0.0, 0.01, (1, 1, 1))
    assert info.value.hypothesis == "lam is O(t)"


def test_cc_lim_examples():
    grid = q.dyadic_grid(0.125, 18)
    est = q.cc_lim_estimate((grid, 0.1 * grid))
    assert est.bounded and est.limsup == 0.0
    est = q.cc_lim_estimate((grid, math.pi / (4 * grid)))
    assert not est.bounded and est.trend == pytest.approx(-1.0, abs=1e-9) and is_divergent(est.limsup)
    est = q.cc_lim_estimate((grid, np.full(grid.size, 3.0)))
    assert est.bounded and est.limsup == 3.0


def test_cc_lim_needs_long_grid():
    with pytest.raises(ValueError):
        q.cc_lim_estimate((q.dyadic_grid(0.125, 5), np.ones(5)))
    with pytest.raises(ValueError):
        q.cc_lim_estimate((q.dyadic_grid(0.125, 9), np.ones(9)))


def test_series_parallel_equals_serial():
    f = corpus.triple(corpus.mixed_measure())
    grid = q.dyadic_grid(0.125, 8)
    a = q.quotient_series(f, ONE, power(2.0), 0.0, grid, "direct", jobs=1)
    b = q.quotient_series(f, ONE, power(2.0), 0.0, grid, "direct", jobs=3)
    assert a.values == b.values


def test_series_grid_must_decrease():
    with pytest.raises(ValueError):
        q.QuotientSeries(0.0, ONE, IDENTITY, (0.1, 0.2), (1.0, 1.0), "kernel")


# -- invariants ---------------------------------------------------------------------------------

TRIPLES = [corpus.triple(mu, b=b) for mu in corpus.measures().values() for b in (0.0, 0.5)]
KAPPAS = [ONE, IDENTITY, power(0.5)]
LAMS = [IDENTITY, power(2.0), power(1.5, 0.5)]


@given(st.sampled_from(TRIPLES), st.sampled_from(KAPPAS), st.sampled_from(LAMS),
       st.floats(-0.5, 1.2), st.integers(2, 14))
def test_method_agreement(f, kappa, lam, tau, k):
    eps = 2.0 ** -k
    kern = q.averaged_quotient_kernel(f, kappa, lam, tau, eps)
    direct = q.averaged_quotient_direct(f, kappa, lam, tau, eps)
    assert abs(direct - kern) <= 1e-6 * max(1.0, abs(kern))


@given(st.sampled_from(TRIPLES), st.sampled_from(LAMS), st.floats(0.1, 10), st.floats(-1, 1), st.integers(2, 16))
def test_kappa_scaling(f, lam, c, tau, k):
    eps = 2.0 ** -k
    a = q.averaged_quotient_kernel(f, ONE, lam, tau, eps)
    b = q.averaged_quotient_kernel(f, ONE.scaled(c), lam, tau, eps)
    assert b == pytest.approx(a / c, rel=1e-14)
    assert a >= 0


@given(st.sampled_from(TRIPLES), st.sampled_from(KAPPAS), st.sampled_from([IDENTITY, power(2.0)]),
       st.floats(-0.5, 1.2))
def test_augur_sandwich(f, kappa, lam, tau):
    trip = f.triple()
    grid = q.dyadic_grid(0.125, 12)
    consts = q.fit_augur_constants(trip.mu, trip.b, lam, tau, grid[:1])
    for eps in grid:
        ab = q.augur_bounds(trip.mu, trip.b, kappa, lam, tau, eps, consts)
        val = q.averaged_quotient_kernel(f, kappa, lam, tau, eps)
        assert ab.lower <= val * (1 + 1e-12) and val <= ab.upper * (1 + 1e-12)


def test_zero_measure_zero_b_gives_zero():
    f = NevanlinnaTriple(1.0, 0.0, None)
    assert q.averaged_quotient_kernel(f, ONE, IDENTITY, 0.0, 0.1) == 0.0
