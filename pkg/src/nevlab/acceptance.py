"""Acceptance suites: each checks one end-to-end property at a stated tolerance.

``run_suite(name)`` returns a list of :class:`CriterionResult`; the CLI's
``verify`` subcommand and ``tests/test_acceptance.py`` both call it.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from . import corpus
from . import measures as m
from .errors import is_divergent
from .foliation import (conformal_invariance_check, enigma_member, eventually_nonincreasing,
                        horocyclic_profile, kernel_extreme_bound_check)
from .gauges import IDENTITY, ONE, is_augury, power
from .pick import MatrixResolvent, MobiusMap, NevanlinnaTriple, aronszajn_krein, rank_one_perturb
from .quotients import (augur_bounds, averaged_quotient_direct, averaged_quotient_kernel,
                        fit_augur_constants, grid_between)
from .regularity import (C_SWEEP, fortunate_verdict, gamma_regular_verdict, sub_density_verdict,
                         window_fortune_gauge)


@dataclass
class CriterionResult:
    key: str
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.key}: {self.title} -- {self.detail} ({self.seconds:.1f} s)"


def kernel_agreement():
    """Direct and kernel averaged quotients agree to 1e-6 relative."""
    gauges = [(ONE, power(2)), (IDENTITY, IDENTITY), (power(0.5), IDENTITY)]
    grid = grid_between(3, 20)
    worst, cases, failures = 0.0, 0, []
    for name, mu in corpus.measures().items():
        f = NevanlinnaTriple(0.0, 0.0, mu)
        for kappa, lam in gauges:
            for eps in grid:
                d = averaged_quotient_direct(f, kappa, lam, 0.0, eps)
                k = averaged_quotient_kernel(f, kappa, lam, 0.0, eps)
                err = abs(d - k) / max(1.0, abs(k))
                worst = max(worst, err)
                cases += 1
                if err > 1e-6:
                    failures.append((name, repr(kappa), repr(lam), eps))
    return not failures, f"{cases} cases, worst relative gap {worst:.2e}, failures {failures[:3]}"


def closed_form_anchor():
    """-1/z with kappa = 1, lam = id: A(eps) = pi / (4 eps) to 1e-10 relative, both methods."""
    f = corpus.inverse_z()
    worst = 0.0
    for eps in grid_between(3, 20):
        exact = math.pi / (4 * eps)
        for a in (averaged_quotient_kernel(f, ONE, IDENTITY, 0.0, eps),
                  averaged_quotient_direct(f, ONE, IDENTITY, 0.0, eps)):
            worst = max(worst, abs(a - exact) / exact)
    return worst <= 1e-10, f"worst relative error {worst:.2e}"


def augur_sandwich():
    """Constants fitted at eps = 2^-3; lower <= A <= upper at every smaller grid eps."""
    grid = grid_between(3, 20)
    violations, checks = [], 0
    for name, mu in corpus.measures().items():
        for b in (0.0, 1.0):
            f = NevanlinnaTriple(0.0, b, mu)
            for kappa in (ONE, power(0.5)):
                for lam in (IDENTITY, power(2)):
                    consts = fit_augur_constants(mu, b, lam, 0.0, grid[:1])
                    for eps in grid[1:]:
                        A = averaged_quotient_kernel(f, kappa, lam, 0.0, eps)
                        bd = augur_bounds(mu, b, kappa, lam, 0.0, eps, consts)
                        checks += 1
                        if not bd.lower <= A * (1 + 1e-12) or not A <= bd.upper * (1 + 1e-12):
                            violations.append((name, b, repr(kappa), repr(lam), eps))
    return not violations, f"{checks} checks, {len(violations)} violations {violations[:3]}"


FORTUNE_SCENARIOS = [
    ("lebesgue", m.lebesgue(), 0.0),
    ("lebesgue", m.lebesgue(), 0.5),
    ("lebesgue", m.lebesgue(), -0.5),
    ("atom", m.dirac(0.0), 0.0),
    ("atom", m.dirac(0.0), -1.0),
    ("|t|^0.5", m.power_density(0.5), 0.0),
    ("|t|^0.5", m.power_density(0.5), 1.0),
    ("|t|", m.power_density(1.0), 0.5),
    ("|t|^-0.5", m.power_density(-0.5), 0.0),
    ("|t|^-0.5", m.power_density(-0.5), -1.0),
    ("cantor", m.cantor(), 0.0),
    ("cantor", m.cantor(), -0.7),
]


def fortune_density():
    """fortunate_verdict and sub_density_verdict agree on 12 power-law scenarios."""
    rows, bad = [], []
    for name, mu, s in FORTUNE_SCENARIOS:
        F = power(s)
        fort = fortunate_verdict(NevanlinnaTriple(0.0, 0.0, mu), F, 0.0)
        dens = sub_density_verdict(mu, F, 0.0)
        rows.append(f"{name}/t^{s:g}:{'Y' if fort.holds else 'N'}{'Y' if dens.holds else 'N'}")
        if fort.holds != dens.holds:
            bad.append(name)
    return not bad, " ".join(rows)


def regfort_round_trip():
    """|t|^p with gamma = t^eta: verdict matches p - eta > -1; the window gauge is an augury iff regular."""
    rows, bad = [], []
    for p in (-0.5, 0.0, 0.5):
        mu = m.power_density(p)
        F = window_fortune_gauge(mu, 0.0)
        for eta in (0.3, 0.8, 1.2):
            gamma = power(eta)
            expected = p - eta > -1
            verdict = gamma_regular_verdict(mu, gamma, 0.0)
            aug = any(is_augury(F, gamma, C).holds for C in C_SWEEP)
            ok = verdict.holds == expected and aug == verdict.holds
            rows.append(f"p={p:g},eta={eta:g}:{'R' if verdict.holds else 'N'}{'A' if aug else '-'}")
            if not ok:
                bad.append((p, eta))
    return not bad, " ".join(rows)


def cantor_exponent():
    """Log-log slope of the Cantor window mass at 0 over [3^-10, 3^-1] is log 2 / log 3 within 0.02."""
    eps = np.geomspace(3.0 ** -10, 3.0 ** -1, 60)
    mass = m.window_mass(m.cantor(), 0.0, eps)
    slope = float(np.polyfit(np.log(eps), np.log(mass), 1)[0])
    target = math.log(2) / math.log(3)
    return abs(slope - target) <= 0.02, f"slope {slope:.4f} vs {target:.4f}"


def aronszajn_krein_consistency():
    """F/(1 + alpha F) matches the resolvent of A + alpha <., phi> phi to 1e-9 relative."""
    F = corpus.jacobi_resolvent(50)
    u = qmc.Halton(d=2, seed=1).random(100)
    z = (4 * u[:, 0] - 2) + 1j * np.exp(np.log(1e-2) + u[:, 1] * np.log(1e3))
    worst = 0.0
    for alpha in (-1.0, 0.3, 0.7, 2.0):
        lhs = np.asarray(aronszajn_krein(F, alpha)(z))
        A_alpha, _ = rank_one_perturb(F.A, F.phi, alpha)
        rhs = np.asarray(MatrixResolvent(A_alpha, F.phi)(z))
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / np.abs(rhs))))
    return worst <= 1e-9, f"worst relative gap {worst:.2e}"


def invariance_cases():
    fs = {
        "z+1/2": corpus.identity_plus(0.5),
        "lebesgue": NevanlinnaTriple(0.0, 0.0, m.lebesgue()),
        "t^2-density": corpus.quadratic_density(0.5),
        "cantor": NevanlinnaTriple(0.0, 0.0, m.cantor()),
    }
    maps = [MobiusMap(0, -1, 1, 0), MobiusMap(2, 1, 1, 3), MobiusMap(1, -1, 1, 1)]
    return fs, maps


def conformal_invariance():
    """Enigma membership agrees for f and M o f (gamma = t^1.5, lam = t, kappa = t^0.75)."""
    fs, maps = invariance_cases()
    gamma, lam, kappa = power(1.5), IDENTITY, power(0.75)
    rows, bad = [], []
    for name, f in fs.items():
        for M in maps:
            rep = conformal_invariance_check(f, M, kappa, lam, gamma, 0.0)
            rows.append(f"{name}:{int(rep.member_f)}{int(rep.member_mf)}")
            if not rep.agreement:
                bad.append((name, M))
    return not bad and len(rows) == 12, " ".join(rows)


BOUND_COMBOS = [
    (power(1.0), 1.0, 1.0),
    (power(1.0, 0.5), 4.0, 0.5),
    (power(2.0), 1.0, 1.0),
    (power(2.0), 8.0, 1.0),
    (power(1.5), 2.0, 1.0),
    (power(1.0, 2.0), 0.5, 2.0),
]


def horocyclic_members():
    return {
        "z+1/2": corpus.identity_plus(0.5),
        "atom-at-1/2": NevanlinnaTriple(0.0, 0.0, m.dirac(0.5, 0.5)),
        "t^2-density": NevanlinnaTriple(0.0, 0.0, m.Measure(
            (m.DensityComponent((-0.5, 0.5), ((0.0, 0.0, 0.1),)),), "t^2/10")),
    }


def horocyclic_continuity():
    """Profiles of gamma-regular members fall below 0.01; the kernel extreme bound holds."""
    gamma = power(1.5)
    betas = [2.0 ** k for k in range(1, 11)]
    rows, ok = [], True
    for name, f in horocyclic_members().items():
        if not gamma_regular_verdict(f.triple().mu, gamma, 0.0).holds:
            ok = False
            rows.append(f"{name}: not regular")
            continue
        prof = [s for _, s in horocyclic_profile(f, gamma, 1.0, 0.0, betas)]
        good = eventually_nonincreasing(prof) and prof[-1] < 0.01
        ok &= good
        rows.append(f"{name}: final {prof[-1]:.2e}{'' if good else ' FAIL'}")
    for g, beta, C in BOUND_COMBOS:
        seen, bound, holds = kernel_extreme_bound_check(g, beta, C, 10_000)
        ok &= holds
        rows.append(f"{g!r},beta={beta:g}: {seen:.3f}<={bound:.3f}{'' if holds else ' FAIL'}")
    return ok, "; ".join(rows)


LAYER_CAKE_CONVERGENT = [
    ("lebesgue", m.lebesgue(), power(0.5)),
    ("atom-at-1/2", m.dirac(0.5), IDENTITY),
    ("|t|^0.5", m.power_density(0.5), power(1.2)),
    ("|t|", m.abs_density(), power(1.5)),
    ("two-atom", m.atoms([(-0.25, 1.0), (0.6, 0.5)]), power(0.5)),
]
LAYER_CAKE_DIVERGENT = [
    ("atom", m.dirac(0.0), power(0.5)),
    ("lebesgue", m.lebesgue(), power(2.0)),
]


def layer_cake():
    """Residual below 1e-6 for 5 convergent pairs; both sides diverge for 2 divergent pairs."""
    rows, ok = [], True
    for name, mu, g in LAYER_CAKE_CONVERGENT:
        sides = m.layer_cake_sides(mu, g, 0.0)
        r = float(sides.left - sides.right)
        good = not is_divergent(sides.left) and abs(r) < 1e-6
        ok &= good
        rows.append(f"{name}: {r:.1e}")
    for name, mu, g in LAYER_CAKE_DIVERGENT:
        sides = m.layer_cake_sides(mu, g, 0.0)
        good = is_divergent(sides.left) and is_divergent(sides.right)
        ok &= good
        rows.append(f"{name}: {'both diverge' if good else 'MISMATCH'}")
    return ok, "; ".join(rows)


SUITES = {
    "kernel-agreement": ("1", "kernel/direct agreement", kernel_agreement),
    "closed-form": ("2", "closed-form anchor pi/(4 eps)", closed_form_anchor),
    "augur-sandwich": ("3", "augur sandwich", augur_sandwich),
    "fortune-density": ("4", "fortune <=> sub-density", fortune_density),
    "regfort": ("5", "regularity/augury round trip", regfort_round_trip),
    "cantor-exponent": ("6", "Cantor density exponent", cantor_exponent),
    "aronszajn-krein": ("7", "Aronszajn-Krein consistency", aronszajn_krein_consistency),
    "conformal-invariance": ("8", "conformal invariance of enigmas", conformal_invariance),
    "horocyclic": ("9", "horocyclic continuity", horocyclic_continuity),
    "layer-cake": ("10", "layer-cake identity", layer_cake),
}


def run_criterion(name):
    key, title, fn = SUITES[name]
    t0 = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failure of the criterion, reported as such
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(key, f"{name} ({title})", bool(passed), detail, time.perf_counter() - t0)


def run_suite(name="all"):
    if name == "all":
        return [run_criterion(n) for n in SUITES]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(['all', *SUITES])}")
    return [run_criterion(name)]
