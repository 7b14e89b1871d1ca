from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nevlab import corpus
from nevlab import measures as m
from nevlab.errors import is_divergent
from nevlab.gauges import IDENTITY, ONE, PowerLog, power
from nevlab.regularity import (fortunate_verdict, gamma_regular_verdict, regfort_equivalence_check,
                               sub_density_verdict, window_fortune_gauge)

CANTOR_DIM = math.log(2) / math.log(3)
ABS_T = m.power_density(1.0, name="|t|")


def test_sub_density_examples():
    v = sub_density_verdict(m.dirac(0.0), ONE, 0.0)
    assert not v.holds and is_divergent(v.statistic)
    v = sub_density_verdict(m.lebesgue(-1, 1), ONE, 0.0)
    assert v.holds and v.statistic == pytest.approx(2.0, rel=1e-12)
    assert sub_density_verdict(m.cantor(), power(CANTOR_DIM - 1), 0.0).holds


def test_sub_density_monotone_in_F():
    # F1 <= F2 near 0: a bound for F1 carries over to F2
    mu = m.power_density(0.5)
    assert sub_density_verdict(mu, power(0.5), 0.0).holds
    assert sub_density_verdict(mu, power(0.2), 0.0).holds
    assert not sub_density_verdict(mu, power(0.8), 0.0).holds


def test_fortunate_examples():
    assert fortunate_verdict(corpus.triple(m.lebesgue(-1, 1)), ONE, 0.0).holds
    assert not fortunate_verdict(corpus.inverse_z(), ONE, 0.0).holds
    for F in (ONE, power(-0.5), IDENTITY):
        assert fortunate_verdict(corpus.identity_plus(0.0), F, 0.0).holds


def test_fortune_matches_sub_density_on_corpus():
    for mu in corpus.measures().values():
        for F in (ONE, power(-0.5), power(CANTOR_DIM - 1), power(0.5)):
            fort = fortunate_verdict(corpus.triple(mu), F, 0.0).holds
            dens = sub_density_verdict(mu, F, 0.0).holds
            assert fort == dens, (mu.name, F)


def test_gamma_regular_examples():
    assert not gamma_regular_verdict(m.dirac(0.0), power(0.5), 0.0).holds
    assert gamma_regular_verdict(ABS_T, power(1.5), 0.0).holds
    assert not gamma_regular_verdict(ABS_T, power(2.0), 0.0).holds


def test_gamma_regular_needs_monotone_gamma():
    with pytest.raises(ValueError):
        gamma_regular_verdict(ABS_T, power(-0.5), 0.0)


def test_gamma_regular_with_log_gauge():
    # the gauge lives on (0, 1) only, so the neighbourhood shrinks for large C
    assert gamma_regular_verdict(ABS_T, PowerLog(1.0, 1.5, -1.0), 0.0).holds
    assert not gamma_regular_verdict(ABS_T, PowerLog(1.0, 2.5, -1.0), 0.0).holds


@given(st.floats(-0.8, 1.5), st.floats(0.1, 2.5))
def test_gamma_regular_exponent_rule(p, eta):
    # |t|^p / |t|^eta is integrable at 0 iff p - eta > -1
    if abs(p - eta + 1) < 0.15:
        return
    mu = m.power_density(p)
    assert gamma_regular_verdict(mu, power(eta), 0.0).holds == (p - eta > -1)


def test_regfort_examples():
    r = regfort_equivalence_check(corpus.triple(m.power_density(0.5)), power(1.2), 0.0)
    assert r.agreement and r.regular.holds and r.augury and r.fortunate.holds and r.backward is not None
    r = regfort_equivalence_check(corpus.inverse_z(), power(0.5), 0.0)
    assert r.agreement and not r.regular.holds and not r.augury
    r = regfort_equivalence_check(corpus.triple(m.cantor()), power(0.5), 0.0)
    assert r.agreement and r.regular.holds


def test_regfort_report_is_json_ready():
    import json
    r = regfort_equivalence_check(corpus.triple(m.power_density(0.5)), power(0.8), 0.0)
    json.dumps(r.to_json())


def test_window_fortune_gauge_on_lebesgue():
    F = window_fortune_gauge(m.lebesgue(-1, 1), 0.0)
    assert F(2.0 ** -20) == pytest.approx(2.0, rel=1e-12)
