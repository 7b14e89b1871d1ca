from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nevlab import corpus
from nevlab import measures as m
from nevlab.errors import ClassificationError
from nevlab.foliation import (CLASSES, StolzSpec, classical_as_lambda, classify_point, conformal_invariance_check,
                              crypto_gauge, crypto_reference, enigma_member, eventually_nonincreasing,
                              horocyclic_profile, invariance_hypotheses, kernel_extreme_bound_check,
                              stolz_membership)
from nevlab.gauges import IDENTITY, ONE, compose, dyadic_table, power
from nevlab.pick import IDENTITY_MAP, MobiusMap, NegativeReciprocal, NevanlinnaTriple, mobius_compose
from nevlab.quotients import grid_between, quotient_series

Z = corpus.identity_plus(0.0)
INV = corpus.inverse_z()
SQRT = corpus.triple(m.power_density(0.5))
BETAS = [2.0 ** k for k in range(1, 11)]


# -- Stolz geometry ------------------------------------------------------------------------------

def test_stolz_examples():
    assert stolz_membership(1j, 0.0, StolzSpec("classical", M=1.0))
    assert not stolz_membership(1 + 0.1j, 0.0, StolzSpec("classical", M=0.5))
    for x in (0.3, 0.01, 0.7):
        assert stolz_membership(x + 1j * x * x, 0.0, StolzSpec("lambda", lam=power(2.0), C=x))


def test_stolz_cap_on_offset():
    spec = StolzSpec("lambda", lam=IDENTITY, C=0.1)
    assert not stolz_membership(0.2 + 1j, 0.0, spec)


def test_stolz_rejects_non_monotone_lambda():
    with pytest.raises(ValueError):
        StolzSpec("lambda", lam=power(-1.0))


@given(st.floats(0.05, 0.95), st.floats(-2, 2), st.floats(1e-3, 2), st.floats(-1, 1))
def test_classical_equals_lambda_region(M, x, y, tau):
    z = complex(tau + x, y)
    # skip points within rounding of the common boundary
    if abs(y - M * abs(z - tau)) < 1e-9:
        return
    assert stolz_membership(z, tau, StolzSpec("classical", M=M)) == \
        stolz_membership(z, tau, StolzSpec("lambda", lam=classical_as_lambda(M)))


# -- classification ------------------------------------------------------------------------------

def test_classify_examples():
    v = classify_point(INV, 0.0)
    assert v.cls == "Julia" and v.nt_limit_estimate == math.inf
    v = classify_point(NevanlinnaTriple(0.0, 0.0, m.lebesgue_line()), 0.0)
    assert v.cls == "TrueAC" and complex(v.nt_limit_estimate).imag == pytest.approx(math.pi, rel=1e-9)
    v = classify_point(Z, 0.0)
    assert v.cls == "Julia" and abs(v.nt_limit_estimate) < 1e-8


def test_classify_more_points():
    assert classify_point(corpus.triple(m.lebesgue(-1, 1)), 0.0).cls == "TrueAC"
    assert classify_point(SQRT, 0.0).cls == "Crypto"
    assert classify_point(corpus.triple(m.lebesgue(-1, 1)), 1.0).cls == "Crypto"
    assert classify_point(corpus.triple(m.lebesgue(-1, 1)), 2.0).cls == "Julia"


CORPUS = [Z, INV, SQRT, corpus.quadratic_density(), corpus.jacobi_resolvent(10)] + \
         [corpus.triple(mu) for mu in corpus.measures().values()]


@pytest.mark.parametrize("f", CORPUS)
@pytest.mark.parametrize("tau", [0.0, 0.5, 1.0])
def test_foliation_is_a_partition(f, tau):
    v = classify_point(f, tau)
    assert v.cls in CLASSES
    assert v.to_json()["class"] == v.cls


# -- enigmas -------------------------------------------------------------------------------------

def test_enigma_examples():
    assert enigma_member(Z, ONE, IDENTITY, 0.0).member
    r = enigma_member(INV, ONE, IDENTITY, 0.0)
    assert r.member and r.reciprocal_branch.bounded and not r.f_branch.bounded


@pytest.mark.parametrize("f", [INV, SQRT, corpus.triple(m.cantor())])
def test_enigma_reciprocal_duality(f):
    kappa, lam = power(0.75), IDENTITY
    a = enigma_member(f, kappa, lam, 0.0)
    b = enigma_member(NegativeReciprocal(f), kappa, lam, 0.0)
    assert a.member == b.member


def test_cantor_enigma_stable_under_mobius():
    f = corpus.triple(m.cantor())
    kappa, lam, gamma = power(0.75), IDENTITY, power(1.5)
    for M in (MobiusMap(0, -1, 1, 0), MobiusMap(2, 1, 1, 3)):
        assert conformal_invariance_check(f, M, kappa, lam, gamma, 0.0).agreement


# -- crypto gauge --------------------------------------------------------------------------------

def test_crypto_gauge_normalises_series():
    kappa = crypto_gauge(SQRT, 0.0)
    assert kappa.limit_at_zero() == 0.0 and kappa.tail_slope() > 0
    grid = grid_between(2, 24)
    series = quotient_series(crypto_reference(SQRT, 0.0), kappa, IDENTITY, 0.0, grid, "direct", rtol=1e-12)
    np.testing.assert_allclose(series.values, 1.0, atol=1e-8)


def test_crypto_gauge_of_infinite_limit():
    # Lebesgue on [-1, 1] at its endpoint: |f| grows like log, so -1/f is used
    f = corpus.triple(m.lebesgue(-1, 1))
    kappa = crypto_gauge(f, 1.0)
    series = quotient_series(crypto_reference(f, 1.0), kappa, IDENTITY, 1.0, grid_between(2, 20), "direct",
                             rtol=1e-12)
    np.testing.assert_allclose(series.values, 1.0, atol=1e-8)


def test_crypto_gauge_rejects_julia_point():
    with pytest.raises(ClassificationError):
        crypto_gauge(Z, 0.0)


# -- conformal invariance ------------------------------------------------------------------------

@pytest.mark.parametrize("alpha,eta,beta", [(1.0, 1.5, 0.75), (1.0, 2.0, 1.5), (1.2, 1.8, 0.9)])
def test_invariance_hypotheses_pass(alpha, eta, beta):
    hyp = invariance_hypotheses(power(beta), power(alpha), power(eta))
    assert all(hyp.values()), hyp


def test_invariance_identity_map():
    rep = conformal_invariance_check(SQRT, IDENTITY_MAP, power(0.75), IDENTITY, power(1.5), 0.0)
    assert rep.agreement


def test_invariance_lebesgue_shift():
    f = corpus.triple(m.lebesgue(-1, 1))
    rep = conformal_invariance_check(f, MobiusMap(1, 1, 0, 1), power(0.75), IDENTITY, power(1.5), 0.0)
    # kappa = t^0.75 makes both series blow up at this true-ac point; what matters is agreement
    assert rep.agreement and rep.member_f == rep.member_mf


# -- horocycles ----------------------------------------------------------------------------------

def test_horocycle_of_identity():
    prof = horocyclic_profile(Z, power(1.5), 1.0, 0.0, BETAS)
    for beta, sup in prof:
        assert sup <= 1 / beta * (1 + 1e-12)


def test_horocycle_of_sqrt_density_decreases():
    prof = [s for _, s in horocyclic_profile(SQRT, power(1.2), 1.0, 0.0, BETAS)]
    assert eventually_nonincreasing(prof, start_fraction=0.0)
    assert prof[-1] < 0.5 * prof[0]


def test_horocycle_rejects_pole():
    with pytest.raises(ClassificationError):
        horocyclic_profile(INV, power(2.0), 1.0, 0.0, BETAS)


def test_horocycle_is_deterministic():
    a = horocyclic_profile(SQRT, power(1.2), 1.0, 0.0, BETAS[:3], seed=4)
    b = horocyclic_profile(SQRT, power(1.2), 1.0, 0.0, BETAS[:3], seed=4)
    assert a == b


def test_bound_check_examples():
    seen, bound, holds = kernel_extreme_bound_check(IDENTITY, 1.0, 1.0)
    assert bound == 2.0 and holds and seen <= 2.0
    seen, bound, holds = kernel_extreme_bound_check(power(1.0, 0.5), 4.0, 0.5)
    assert bound == 1.0 and holds


def test_bound_check_decreases_in_beta():
    tab = dyadic_table(lambda t: t ** 2, -30, 0)
    seen = [kernel_extreme_bound_check(tab, b, 1.0)[0] for b in (1, 4, 16, 64)]
    assert all(b < a for a, b in zip(seen, seen[1:]))
