"""Boundary diagnostics for Pick functions on explicit Nevanlinna measures."""

from __future__ import annotations

from .errors import (ClassificationError, DivergentValue, DomainError, NevlabError, NumericError,
                     PreconditionError, SingularityError, UnsupportedError, is_divergent)
from .foliation import (StolzSpec, classify_point, conformal_invariance_check, crypto_gauge, enigma_member,
                        horocyclic_profile, kernel_extreme_bound_check, stolz_membership)
from .gauges import (IDENTITY, ONE, PowerLog, Tabulated, asymptotic_class, compose, decompose_fortune,
                     is_augury, power, product)
from .measures import (Measure, atoms, cantor, cauchy_integral, dirac, layer_cake_residual, layer_cake_sides,
                       lebesgue, lebesgue_line, poisson_extension, power_density, window_mass)
from .pick import (MatrixResolvent, MobiusMap, NevanlinnaTriple, aronszajn_krein, evaluate, mobius_compose,
                   rank_one_perturb)
from .quotients import (augur_bounds, averaged_quotient, cc_lim_estimate, fit_augur_constants,
                        julia_fatou, quotient_series)
from .regularity import (fortunate_verdict, gamma_regular_verdict, regfort_equivalence_check,
                         sub_density_verdict)

__version__ = "0.1.0"
